#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hallcal/params.hpp"
#include "hallcal/plume.hpp"
#include "hallcal/thruster.hpp"

namespace hallcal::system {

struct SystemConfig {
  thruster::ThrusterConfig thruster;
  double divergence_radius = 1.0;  // m, radius at which the divergence angle is evaluated
  double cex_cross_section = plume::kDefaultCexCrossSection;

  void validate() const;
};

/// Angular sweep of the plume current density at one radius.
struct JionSweep {
  double radius = 1.0;          // m
  std::vector<double> angles;   // rad from the thruster axis
};

struct JionProfile {
  double radius = 0.0;
  std::vector<double> angles;
  std::vector<double> values;  // A/m^2
};

/// Which outputs to compute. The thruster and plume are skipped entirely when
/// only the coupling voltage is needed.
struct OutputRequest {
  bool cathode_only = false;
  std::vector<JionSweep> j_ion;

  static OutputRequest cathode() { return {true, {}}; }
};

struct SystemOutput {
  double V_cc = 0.0;  // V
  bool thruster_evaluated = false;
  double thrust_uncorrected = 0.0;  // N
  double thrust_corrected = 0.0;    // N
  double discharge_current = 0.0;   // A
  double beam_current = 0.0;        // A
  double divergence_angle = 0.0;    // rad
  std::vector<double> z;            // m
  std::vector<double> u_ion;        // m/s, time-averaged
  std::vector<JionProfile> j_ion;
  thruster::PlasmaState profile;    // time-averaged solver fields
};

/// Outcome of one coupled evaluation: either outputs or a failure message.
struct Evaluation {
  std::optional<SystemOutput> output;
  std::string failure;

  bool ok() const { return output.has_value(); }
};

/// Coupled cathode -> thruster -> plume model. Reentrant: evaluate() may be
/// called from several threads at once.
class SystemModel {
 public:
  explicit SystemModel(SystemConfig config, std::size_t cache_capacity = 0);

  /// Throws the thruster's SolverDivergence/SolverTimeout and DomainError on failure.
  SystemOutput evaluate(const ParameterSet& theta, const OperatingCondition& cond,
                        const OutputRequest& request = {}) const;

  /// Like evaluate() but reports solver and domain failures in the result. When
  /// caching is enabled, exact repeats of (theta, cond, request) are served from
  /// the cache.
  std::shared_ptr<const Evaluation> try_evaluate(const ParameterSet& theta, const OperatingCondition& cond,
                                                 const OutputRequest& request = {}) const;

  const SystemConfig& config() const { return config_; }
  long thruster_runs() const { return thruster_runs_.load(); }
  long cache_hits() const { return cache_hits_.load(); }
  long failures() const { return failures_.load(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<double>& key) const;
  };

  SystemConfig config_;
  std::size_t cache_capacity_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::vector<double>, std::shared_ptr<const Evaluation>, KeyHash> cache_;
  mutable std::atomic<long> thruster_runs_{0};
  mutable std::atomic<long> cache_hits_{0};
  mutable std::atomic<long> failures_{0};
};

}  // namespace hallcal::system
