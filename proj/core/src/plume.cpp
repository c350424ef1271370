#include "hallcal/plume.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>

#include "hallcal/errors.hpp"
#include "hallcal/numerics.hpp"

namespace hallcal::plume {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Integral over [0, pi/2] with breakpoints at 1, 3 and 8 times each width.
double hemisphere_integral(const std::function<double(double)>& f, std::initializer_list<double> widths) {
  std::vector<double> breaks{0.0, kHalfPi};
  for (double w : widths) {
    for (double k : {1.0, 3.0, 8.0}) {
      const double b = k * w;
      if (b > 0.0 && b < kHalfPi) breaks.push_back(b);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    total += numerics::integrate(f, breaks[i], breaks[i + 1], 1e-13, 1e-300).value;
  }
  return total;
}

}  // namespace

PlumeParams PlumeParams::from(const ParameterSet& theta, double cex_cross_section) {
  return {theta[Param::c0], theta[Param::c1], theta[Param::c2], theta[Param::c3],
          theta[Param::c4], theta[Param::c5], cex_cross_section};
}

double background_neutral_density(double P_B, const PlumeParams& p) {
  if (!(P_B >= 0.0)) throw DomainError("background pressure must be nonnegative");
  return p.c4 * P_B + p.c5;
}

double divergence_angle(double P_B, const PlumeParams& p) {
  const double theta = p.c2 * P_B + p.c3;
  if (!std::isfinite(theta)) throw ParameterRangeError("plume divergence angle is not finite");
  return std::clamp(theta, kMinDivergenceAngle, kHalfPi);
}

double hemispherical_normalizer(double theta) {
  if (!(theta > 0.0)) throw ParameterRangeError("Gaussian plume width must be positive");
  const auto g = [theta](double phi) {
    const double x = phi / theta;
    return std::exp(-x * x) * std::sin(phi);
  };
  return 2.0 * std::numbers::pi * hemisphere_integral(g, {theta});
}

CurrentDensityModel::CurrentDensityModel(const PlumeParams& params, double beam_current, double background_pressure)
    : params_(params), beam_current_(beam_current) {
  if (!(params.c0 >= 0.0 && params.c0 <= 1.0)) throw ParameterRangeError("plume c0 must lie in [0, 1]");
  if (!(params.c1 > 0.0)) throw ParameterRangeError("plume c1 must be positive");
  if (!(beam_current >= 0.0)) throw DomainError("beam current must be nonnegative");
  theta_scatter_ = divergence_angle(background_pressure, params);
  theta_main_ = std::max(params.c1 * theta_scatter_, kMinDivergenceAngle);
  norm_main_ = hemispherical_normalizer(theta_main_);
  norm_scatter_ = hemispherical_normalizer(theta_scatter_);
  neutral_density_ = background_neutral_density(background_pressure, params);
  if (!(neutral_density_ >= 0.0)) throw ParameterRangeError("plume neutral density must be nonnegative");
}

double CurrentDensityModel::attenuation(double r) const {
  return std::exp(-neutral_density_ * params_.cex_cross_section * r);
}

double CurrentDensityModel::operator()(double r, double phi) const {
  if (!(r > 0.0)) throw DomainError("plume radius must be positive");
  if (!(phi >= 0.0 && phi <= kHalfPi + 1e-12)) throw DomainError("plume angle must lie in [0, pi/2]");
  const double a = attenuation(r);
  const double xm = phi / theta_main_;
  const double xs = phi / theta_scatter_;
  const double beam = params_.c0 * std::exp(-xm * xm) / norm_main_;
  const double scatter = (1.0 - params_.c0) * std::exp(-xs * xs) / norm_scatter_;
  const double cex = 1.0 / (2.0 * std::numbers::pi);
  return beam_current_ * (a * (beam + scatter) + (1.0 - a) * cex) / (r * r);
}

double current_density(double r, double phi, double beam_current, double P_B, const PlumeParams& p) {
  return CurrentDensityModel(p, beam_current, P_B)(r, phi);
}

double effective_divergence(const std::function<double(double)>& j) {
  const auto axial = [&j](double phi) { return j(phi) * std::cos(phi) * std::sin(phi); };
  const auto total = [&j](double phi) { return j(phi) * std::sin(phi); };
  // Breakpoints resolve profiles down to 1e-3 rad wide.
  const double iz = hemisphere_integral(axial, {1e-3, 1e-2, 0.1});
  const double ib = hemisphere_integral(total, {1e-3, 1e-2, 0.1});
  if (!(ib > 0.0)) throw DomainError("divergence angle undefined for zero total current");
  return std::acos(std::clamp(iz / ib, -1.0, 1.0));
}

double effective_divergence(const CurrentDensityModel& model, double r) {
  const auto axial = [&](double phi) { return model(r, phi) * std::cos(phi) * std::sin(phi); };
  const auto total = [&](double phi) { return model(r, phi) * std::sin(phi); };
  const double iz = hemisphere_integral(axial, {model.main_angle(), model.scatter_angle()});
  const double ib = hemisphere_integral(total, {model.main_angle(), model.scatter_angle()});
  if (!(ib > 0.0)) throw DomainError("divergence angle undefined for zero total current");
  return std::acos(std::clamp(iz / ib, -1.0, 1.0));
}

double effective_divergence(std::span<const double> phi, std::span<const double> j) {
  if (phi.size() != j.size() || phi.size() < 2) throw DomainError("sampled profile needs >= 2 matching points");
  double iz = 0.0;
  double ib = 0.0;
  for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
    const double h = phi[k + 1] - phi[k];
    const double s0 = std::sin(phi[k]);
    const double s1 = std::sin(phi[k + 1]);
    ib += 0.5 * h * (j[k] * s0 + j[k + 1] * s1);
    iz += 0.5 * h * (j[k] * s0 * std::cos(phi[k]) + j[k + 1] * s1 * std::cos(phi[k + 1]));
  }
  if (!(ib > 0.0)) throw DomainError("divergence angle undefined for zero total current");
  return std::acos(std::clamp(iz / ib, -1.0, 1.0));
}

double corrected_thrust(double thrust, double phi_d) { return thrust * std::cos(phi_d); }

}  // namespace hallcal::plume
