#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hallcal/datasets.hpp"
#include "hallcal/params.hpp"
#include "hallcal/system.hpp"

namespace hallcal::inference {

/// Target averaged relative L2 error gamma_q / sqrt(n_q) per QoI.
struct LikelihoodConfig {
  double default_target = 0.025;
  std::map<datasets::QoI, double> targets;

  double target(datasets::QoI q) const;
  void validate() const;
};

/// Model prediction at the coordinates of one observation. An empty result
/// marks a failed evaluation.
using Predictor = std::function<std::vector<double>(const datasets::Observation&)>;

/// Residual term of the Gaussian log-likelihood, summed over datasets:
///   -1/2 sum_e sum_q ||y_eq - f_q||^2 / (||y_eq||^2 target_q^2)
/// Returns -inf if any prediction is empty, mismatched or non-finite.
double log_likelihood(std::span<const datasets::Dataset> data, const Predictor& predict, const LikelihoodConfig& cfg);

/// Couples a system model with training data and priors. The model is run
/// once per distinct operating condition per call, with the conditions spread
/// over `workers` threads.
class Posterior {
 public:
  Posterior(const system::SystemModel& model, std::vector<datasets::Dataset> data, PriorSet priors,
            LikelihoodConfig cfg, int workers = 1);

  double log_likelihood(const ParameterSet& theta) const;
  double log_prior(const ParameterSet& theta) const { return log_prior_density(theta, priors_); }
  /// Short-circuits to -inf outside the prior support without running the model.
  double log_posterior(const ParameterSet& theta) const;
  /// Log posterior density of the sampling-space vector x (log10 for log-uniform parameters).
  double log_posterior_sampling(std::span<const double> x) const;

  const PriorSet& priors() const { return priors_; }
  const std::vector<datasets::Dataset>& data() const { return data_; }
  const std::vector<OperatingCondition>& conditions() const { return conditions_; }
  const system::SystemModel& model() const { return model_; }

 private:
  const system::SystemModel& model_;
  std::vector<datasets::Dataset> data_;
  PriorSet priors_;
  LikelihoodConfig cfg_;
  int workers_;
  std::vector<OperatingCondition> conditions_;
  std::vector<system::OutputRequest> requests_;
};

using LogDensity = std::function<double(std::span<const double>)>;

struct DramConfig {
  long n_samples = 50000;
  double burn_in_fraction = 0.5;
  long adaptation_interval = 100;
  /// Proposal standard deviation per coordinate; empty uses the caller's default.
  std::vector<double> initial_proposal_sd;
  double dr_scale_factor = 0.2;
  bool adapt = true;
  bool delayed_rejection = true;
  double regularization = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Stage at which a step moved: 0 stayed put, 1 first proposal accepted,
/// 2 delayed-rejection proposal accepted.
struct Chain {
  std::size_t dimension = 0;
  std::vector<std::vector<double>> samples;
  std::vector<double> log_density;
  std::vector<std::uint8_t> stage;
  double burn_in_fraction = 0.5;
  long stage1_proposals = 0;
  long stage1_accepts = 0;
  long stage2_proposals = 0;
  long stage2_accepts = 0;
  long stalled_windows = 0;
  long target_evaluations = 0;

  std::size_t size() const { return samples.size(); }
  /// Index of the first retained sample.
  std::size_t burn_in_end() const;
  void validate() const;
};

/// Called after each step with the step index and the chain so far.
using SampleCallback = std::function<void(std::size_t, const Chain&)>;

/// Delayed-rejection adaptive Metropolis. Stage 1 proposes x + L z with
/// C = L L^T; after a rejection, stage 2 proposes x + gamma L z and accepts
/// with the two-stage ratio that keeps the chain reversible. When `adapt` is
/// set, C is replaced every adaptation_interval steps by
/// (2.38^2/d)(Cov(history) + eps I).
Chain dram_sample(const LogDensity& target, std::vector<double> init, const DramConfig& cfg,
                  const SampleCallback& on_sample = {});

struct ParameterSummary {
  std::string name;
  std::string prior;
  std::string unit;
  double min = 0.0, p05 = 0.0, p50 = 0.0, p95 = 0.0, max = 0.0, std = 0.0;
  double ess = 0.0;
};

struct ChainDiagnostics {
  std::size_t retained = 0;
  double stage1_acceptance = 0.0;
  double stage2_acceptance = 0.0;
  double overall_acceptance = 0.0;
  long stalled_windows = 0;
  std::vector<ParameterSummary> parameters;
};

/// Statistics of the retained half of the chain. `names` labels each
/// coordinate; missing names become x0, x1, ...
ChainDiagnostics chain_diagnostics(const Chain& chain, const std::vector<std::string>& names = {},
                                   const std::vector<std::string>& priors = {});

/// Diagnostics of a chain of ParameterSets with display units (uTorr, log10 exponents).
ChainDiagnostics parameter_diagnostics(const Chain& chain, const PriorSet& priors);

/// Variable | Prior | Min | 5th pctile | 50th pctile | 95th pctile | Max | Std dev
void write_summary_table(std::ostream& out, const ChainDiagnostics& diag);

/// Integrated-autocorrelation effective sample size (Geyer initial positive sequence).
double effective_sample_size(std::span<const double> x);

/// Describes a prior for the summary table, e.g. "U(0, 1)" in display units.
std::string describe_prior(Param p, const PriorSpec& spec);

/// Retained samples as ParameterSets.
std::vector<ParameterSet> retained_parameters(const Chain& chain);

// Chain files: one '#' line with JSON metadata, a column line, then one row per
// sample with the 18 parameters (SI), log_posterior, accepted and stage.
void write_chain_header(std::ostream& out, const std::string& metadata_json);
void write_chain_row(std::ostream& out, std::span<const double> theta, double log_posterior, std::uint8_t stage);
struct ChainFile {
  std::string metadata_json;
  Chain chain;
};
ChainFile read_chain(const std::filesystem::path& path);

/// Calibration driver: samples log_posterior_sampling from `init` and returns a
/// chain whose samples are ParameterSets in SI. Rows are streamed to `chain_out` if given.
Chain calibrate(const Posterior& posterior, const ParameterSet& init, DramConfig cfg, std::ostream* chain_out = nullptr,
                const std::function<void(std::size_t, const Chain&)>& progress = {});

}  // namespace hallcal::inference
