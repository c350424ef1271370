#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hallcal/datasets.hpp"
#include "hallcal/inference.hpp"
#include "hallcal/params.hpp"
#include "hallcal/system.hpp"

namespace hallcal::uq {

enum class Mode { epistemic, total };

std::string_view mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view name);

/// One named model output, scalar (empty coords) or sampled on coords.
struct Channel {
  std::string name;
  std::vector<double> coords;

  std::size_t size() const { return coords.empty() ? 1 : coords.size(); }
};

/// Model outputs for one (parameters, condition), one vector per channel;
/// nullopt marks a failed evaluation.
using ModelFn = std::function<std::optional<std::vector<std::vector<double>>>(const ParameterSet&, const OperatingCondition&)>;

struct Band {
  std::vector<double> q05, q50, q95;
};

struct ChannelPrediction {
  Channel channel;
  std::vector<std::vector<double>> samples;  // successful draws x coordinates
  Band band;
};

struct ConditionPrediction {
  OperatingCondition nominal;
  std::size_t failed = 0;
  std::vector<std::string> failures;
  std::vector<ChannelPrediction> channels;
};

struct PredictionEnsemble {
  Mode mode = Mode::epistemic;
  std::size_t n_samples = 0;
  std::vector<ConditionPrediction> conditions;
};

struct PredictOptions {
  Mode mode = Mode::epistemic;
  std::size_t n_samples = 1000;
  std::uint64_t seed = 0;
  AleatoricSpec aleatoric;
  int workers = 1;
  double max_failure_fraction = 0.1;
};

/// Draws n_samples parameter sets with replacement from `posterior` and, in
/// total mode, perturbs each condition with `aleatoric`. Index draws and
/// aleatoric draws use separate streams, so total mode with zero sigmas
/// reproduces epistemic mode exactly. Failed draws are excluded; more than
/// max_failure_fraction failures at any condition throws DomainError.
PredictionEnsemble posterior_predict(std::span<const ParameterSet> posterior,
                                     std::span<const OperatingCondition> conditions,
                                     const std::vector<Channel>& channels, const ModelFn& model,
                                     const PredictOptions& options);

/// Channels produced by the system model for a request: V_cc, T, T_c, I_D,
/// I_B, divergence_angle, u_ion on `z`, and one j_ion channel per sweep.
std::vector<Channel> system_channels(const system::OutputRequest& request, const std::vector<double>& z);
ModelFn system_model_fn(const system::SystemModel& model, const system::OutputRequest& request);

/// Cell-center grid of the thruster solver.
std::vector<double> solver_grid(const thruster::ThrusterConfig& cfg);

/// Columns: condition, channel, coord, q05, q50, q95, mode.
void write_prediction(std::ostream& out, const PredictionEnsemble& ens);

/// ||y - f|| / ||y||. Throws DomainError when ||y|| = 0.
double relative_l2_error(std::span<const double> y, std::span<const double> f);

/// E_q for every QoI of `ds`, pooling all its observations of q. Missing or
/// failed predictions give nullopt.
std::optional<std::map<datasets::QoI, double>> relative_errors(const datasets::Dataset& ds,
                                                               const inference::Predictor& predict);

struct QoIMetrics {
  datasets::QoI qoi = datasets::QoI::I_D;
  double mu = 0.0;
  double sigma = 0.0;
  double mu50 = 0.0;
  double xi = 0.0;
  double mu50_over_xi = 0.0;
  std::size_t samples = 0;
};

/// mu and sigma (population) of E_q over the sample predictors, mu50 from the
/// median predictor, xi per QoI from `xi`.
std::vector<QoIMetrics> error_metrics(const datasets::Dataset& ds, std::span<const inference::Predictor> samples,
                                      const inference::Predictor& median, const std::map<datasets::QoI, double>& xi);

/// Coordinatewise median of a parameter sample.
ParameterSet coordinatewise_median(std::span<const ParameterSet> samples);

/// Nominal relative error per QoI: explicit entries, else the shared
/// noise_percent of the observations, else `fallback`.
std::map<datasets::QoI, double> nominal_errors(const datasets::Dataset& ds, const std::map<datasets::QoI, double>& xi,
                                               double fallback = 0.025);

/// Runs the system model for every sample and for the coordinatewise median
/// and returns the metrics. Failed samples are skipped.
std::vector<QoIMetrics> error_metrics(const system::SystemModel& model, std::span<const ParameterSet> samples,
                                      const datasets::Dataset& ds, const std::map<datasets::QoI, double>& xi,
                                      int workers = 1);

/// Rows: QoI, label (e.g. Prior/Posterior), mu50, mu, sigma, mu50/xi.
void write_metrics_header(std::ostream& out);
void write_metrics_rows(std::ostream& out, const std::string& label, const std::vector<QoIMetrics>& metrics);

}  // namespace hallcal::uq
