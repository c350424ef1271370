#include "hallcal/params.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hallcal/errors.hpp"
#include "hallcal/units.hpp"

namespace hallcal {
namespace {

constexpr std::array<std::string_view, kNumParams> kNames{
    "T_ec",   "V_vac",  "P_T", "P_star", "alpha_anom", "beta_anom", "z_anom", "L_anom", "dz_anom",
    "u_n",    "c_w",    "f_n", "c0",     "c1",         "c2",        "c3",     "c4",     "c5",
};

constexpr std::array<std::string_view, kNumParams> kDisplayUnits{
    "eV", "V", "uTorr", "uTorr", "-", "-", "-", "-", "-", "m/s", "-", "-", "-", "-", "rad/Pa", "rad", "log10(m^-3/Pa)", "log10(m^-3)",
};

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double positive_normal(double mean, double sigma, Rng& rng) {
  if (sigma <= 0.0) return mean;
  std::normal_distribution<double> normal(mean, sigma);
  for (;;) {
    const double v = normal(rng);
    if (v > 0.0) return v;
  }
}

}  // namespace

void OperatingCondition::validate() const {
  if (!(discharge_voltage > 0.0) || !(background_pressure > 0.0) || !(anode_mass_flow > 0.0)) {
    throw ConfigError("operating condition fields must be strictly positive");
  }
  if (!(background_pressure < 1.0)) {
    throw ConfigError("background pressure " + std::to_string(background_pressure) +
                      " Pa is outside the vacuum-facility range (< 1 Pa)");
  }
}

std::string_view param_name(Param p) { return kNames[index(p)]; }

std::optional<Param> param_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (kNames[i] == name) return static_cast<Param>(i);
  }
  return std::nullopt;
}

std::string_view param_display_unit(Param p) { return kDisplayUnits[index(p)]; }

double to_display(Param p, double value_si) {
  switch (p) {
    case Param::P_T:
    case Param::P_star:
      return value_si / units::utorr;
    case Param::c4:
    case Param::c5:
      return std::log10(value_si);
    default:
      return value_si;
  }
}

void PriorSpec::validate() const {
  switch (kind) {
    case PriorKind::uniform:
    case PriorKind::log_uniform:
      if (!(low < high)) throw ConfigError("prior bounds require low < high");
      break;
    case PriorKind::relative_normal:
      if (!(relative_sigma > 0.0)) throw ConfigError("relative-normal prior requires relative_sigma > 0");
      break;
  }
}

bool PriorSpec::in_support(double value) const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case PriorKind::uniform:
      return value >= low && value <= high;
    case PriorKind::log_uniform: {
      if (value <= 0.0) return false;
      const double e = std::log10(value);
      return e >= low && e <= high;
    }
    case PriorKind::relative_normal:
      return true;
  }
  return false;
}

double PriorSpec::log_density(double value) const {
  if (!in_support(value)) return kNegInf;
  switch (kind) {
    case PriorKind::uniform:
      return -std::log(high - low);
    case PriorKind::log_uniform:
      // d/dx of (log10 x - low)/(high - low)
      return -std::log((high - low) * std::numbers::ln10 * value);
    case PriorKind::relative_normal: {
      const double sigma = relative_sigma * std::abs(nominal);
      const double z = (value - nominal) / sigma;
      return -0.5 * z * z - std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
    }
  }
  return kNegInf;
}

double PriorSpec::sample(Rng& rng) const {
  validate();
  switch (kind) {
    case PriorKind::uniform:
      return std::uniform_real_distribution<double>(low, high)(rng);
    case PriorKind::log_uniform:
      return std::pow(10.0, std::uniform_real_distribution<double>(low, high)(rng));
    case PriorKind::relative_normal:
      return std::normal_distribution<double>(nominal, relative_sigma * std::abs(nominal))(rng);
  }
  return 0.0;
}

PriorSet default_priors() {
  PriorSet p;
  p[index(Param::T_ec)] = PriorSpec::uniform(1.0, 6.0);
  p[index(Param::V_vac)] = PriorSpec::uniform(0.0, 60.0);
  p[index(Param::P_T)] = PriorSpec::uniform(units::utorr_to_pa(10.0), units::utorr_to_pa(100.0));
  p[index(Param::P_star)] = PriorSpec::uniform(units::utorr_to_pa(10.0), units::utorr_to_pa(200.0));
  p[index(Param::alpha_anom)] = PriorSpec::uniform(0.0, 1.0);
  p[index(Param::beta_anom)] = PriorSpec::uniform(0.0, 1.0);
  p[index(Param::z_anom)] = PriorSpec::uniform(0.75, 1.5);
  p[index(Param::L_anom)] = PriorSpec::uniform(0.0, 0.5);
  p[index(Param::dz_anom)] = PriorSpec::uniform(0.0, 0.5);
  p[index(Param::u_n)] = PriorSpec::uniform(100.0, 500.0);
  p[index(Param::c_w)] = PriorSpec::uniform(0.5, 1.5);
  p[index(Param::f_n)] = PriorSpec::uniform(1.0, 10.0);
  p[index(Param::c0)] = PriorSpec::uniform(0.0, 1.0);
  p[index(Param::c1)] = PriorSpec::uniform(0.1, 0.9);
  p[index(Param::c2)] = PriorSpec::uniform(-15.0, 15.0);
  p[index(Param::c3)] = PriorSpec::uniform(0.2, std::numbers::pi / 2.0);
  p[index(Param::c4)] = PriorSpec::log_uniform(18.0, 22.0);
  p[index(Param::c5)] = PriorSpec::log_uniform(14.0, 18.0);
  return p;
}

double sample_prior(const PriorSpec& spec, Rng& rng) { return spec.sample(rng); }

ParameterSet sample_prior(const PriorSet& priors, Rng& rng) {
  ParameterSet theta;
  for (std::size_t i = 0; i < kNumParams; ++i) theta.at(i) = priors[i].sample(rng);
  return theta;
}

double log_prior_density(const ParameterSet& theta, const PriorSet& priors) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double lp = priors[i].log_density(theta.at(i));
    if (lp == kNegInf) return kNegInf;
    sum += lp;
  }
  return sum;
}

std::array<double, kNumParams> to_sampling_space(const ParameterSet& theta, const PriorSet& priors) {
  std::array<double, kNumParams> x{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    x[i] = priors[i].kind == PriorKind::log_uniform ? std::log10(theta.at(i)) : theta.at(i);
  }
  return x;
}

ParameterSet from_sampling_space(std::span<const double> x, const PriorSet& priors) {
  if (x.size() != kNumParams) throw ConfigError("sampling-space vector must have 18 entries");
  ParameterSet theta;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    theta.at(i) = priors[i].kind == PriorKind::log_uniform ? std::pow(10.0, x[i]) : x[i];
  }
  return theta;
}

double log_prior_density_sampling(std::span<const double> x, const PriorSet& priors) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto& s = priors[i];
    if (s.kind == PriorKind::log_uniform) {
      // uniform in the exponent
      if (!(x[i] >= s.low && x[i] <= s.high)) return kNegInf;
      sum -= std::log(s.high - s.low);
    } else {
      const double lp = s.log_density(x[i]);
      if (lp == kNegInf) return kNegInf;
      sum += lp;
    }
  }
  return sum;
}

std::array<double, kNumParams> prior_widths_sampling(const PriorSet& priors) {
  std::array<double, kNumParams> w{};
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto& s = priors[i];
    w[i] = s.kind == PriorKind::relative_normal ? 6.0 * s.relative_sigma * std::abs(s.nominal) : s.high - s.low;
  }
  return w;
}

ParameterSet prior_midpoint(const PriorSet& priors) {
  ParameterSet theta;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto& s = priors[i];
    switch (s.kind) {
      case PriorKind::uniform:
        theta.at(i) = 0.5 * (s.low + s.high);
        break;
      case PriorKind::log_uniform:
        theta.at(i) = std::pow(10.0, 0.5 * (s.low + s.high));
        break;
      case PriorKind::relative_normal:
        theta.at(i) = s.nominal;
        break;
    }
  }
  return theta;
}

OperatingCondition perturb_condition(const OperatingCondition& nominal, const AleatoricSpec& sigma, Rng& rng) {
  OperatingCondition c;
  c.discharge_voltage = positive_normal(nominal.discharge_voltage, sigma.discharge_voltage * nominal.discharge_voltage, rng);
  c.background_pressure =
      positive_normal(nominal.background_pressure, sigma.background_pressure * nominal.background_pressure, rng);
  c.anode_mass_flow = positive_normal(nominal.anode_mass_flow, sigma.anode_mass_flow * nominal.anode_mass_flow, rng);
  return c;
}

}  // namespace hallcal
