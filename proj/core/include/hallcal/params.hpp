#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string_view>

namespace hallcal {

using Rng = std::mt19937_64;

/// Aleatoric inputs of one experiment, stored in SI.
struct OperatingCondition {
  double discharge_voltage = 0.0;    // V
  double background_pressure = 0.0;  // Pa
  double anode_mass_flow = 0.0;      // kg/s

  /// Throws ConfigError unless all fields are positive and the pressure is
  /// below 1 Pa.
  void validate() const;

  friend bool operator==(const OperatingCondition&, const OperatingCondition&) = default;
};

/// Index of each epistemic parameter in a ParameterSet.
enum class Param : std::size_t {
  T_ec,
  V_vac,
  P_T,
  P_star,
  alpha_anom,
  beta_anom,
  z_anom,
  L_anom,
  dz_anom,
  u_n,
  c_w,
  f_n,
  c0,
  c1,
  c2,
  c3,
  c4,
  c5,
};

inline constexpr std::size_t kNumParams = 18;

/// Canonical ASCII name ("T_ec", "P_star", ...).
std::string_view param_name(Param p);
std::optional<Param> param_from_name(std::string_view name);
/// Unit label used when a parameter is shown to a user.
std::string_view param_display_unit(Param p);
/// SI value -> display value (Pa -> uTorr for P_T and P_star, log10 for c4/c5).
double to_display(Param p, double value_si);

inline constexpr std::size_t index(Param p) { return static_cast<std::size_t>(p); }

/// The 18 epistemic parameters, in SI (pressures in Pa, c4/c5 linear).
class ParameterSet {
 public:
  ParameterSet() { values_.fill(0.0); }
  explicit ParameterSet(const std::array<double, kNumParams>& values) : values_(values) {}

  double& operator[](Param p) { return values_[index(p)]; }
  double operator[](Param p) const { return values_[index(p)]; }
  double& at(std::size_t i) { return values_.at(i); }
  double at(std::size_t i) const { return values_.at(i); }

  std::span<const double, kNumParams> values() const { return values_; }
  std::array<double, kNumParams>& raw() { return values_; }

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::array<double, kNumParams> values_;
};

enum class PriorKind { uniform, log_uniform, relative_normal };

/// Marginal prior of one parameter.
///
/// `uniform`: support [low, high] in SI units.
/// `log_uniform`: low/high are base-10 exponents; the value is 10^u.
/// `relative_normal`: N(nominal, (relative_sigma * nominal)^2).
struct PriorSpec {
  PriorKind kind = PriorKind::uniform;
  double low = 0.0;
  double high = 1.0;
  double nominal = 0.0;
  double relative_sigma = 0.0;

  void validate() const;
  bool in_support(double value) const;
  double log_density(double value) const;
  double sample(Rng& rng) const;

  static PriorSpec uniform(double low, double high) { return {PriorKind::uniform, low, high, 0.0, 0.0}; }
  static PriorSpec log_uniform(double low_exp, double high_exp) {
    return {PriorKind::log_uniform, low_exp, high_exp, 0.0, 0.0};
  }
  static PriorSpec relative_normal(double nominal, double sigma) {
    return {PriorKind::relative_normal, 0.0, 0.0, nominal, sigma};
  }
};

using PriorSet = std::array<PriorSpec, kNumParams>;

/// Bounds follow the independent-uniform table of the calibration setup;
/// the cathode pressures use U(10,100) and U(10,200) uTorr.
PriorSet default_priors();

double sample_prior(const PriorSpec& spec, Rng& rng);
ParameterSet sample_prior(const PriorSet& priors, Rng& rng);

/// Sum of marginal log densities in linear (SI) space; -inf outside support.
double log_prior_density(const ParameterSet& theta, const PriorSet& priors);

/// Sampling space: log10 for log-uniform parameters, identity otherwise.
std::array<double, kNumParams> to_sampling_space(const ParameterSet& theta, const PriorSet& priors);
ParameterSet from_sampling_space(std::span<const double> x, const PriorSet& priors);
/// Log density of the prior pushed forward into sampling space.
double log_prior_density_sampling(std::span<const double> x, const PriorSet& priors);
/// Width of each marginal's support in sampling space (for proposal scales).
std::array<double, kNumParams> prior_widths_sampling(const PriorSet& priors);
/// Midpoint of each marginal's support, returned in SI.
ParameterSet prior_midpoint(const PriorSet& priors);

/// Relative standard deviations for the aleatoric perturbation of a condition.
struct AleatoricSpec {
  double discharge_voltage = 0.02;
  double background_pressure = 0.05;
  double anode_mass_flow = 0.02;

  static AleatoricSpec none() { return {0.0, 0.0, 0.0}; }
};

/// Independent relative-normal perturbation of each field; nonpositive draws
/// are redrawn.
OperatingCondition perturb_condition(const OperatingCondition& nominal, const AleatoricSpec& sigma, Rng& rng);

}  // namespace hallcal
