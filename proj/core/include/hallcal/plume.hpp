#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hallcal/params.hpp"

namespace hallcal::plume {

/// Charge-exchange cross section used for beam attenuation. Fixed, not
/// calibrated; its effect trades off against c4/c5.
inline constexpr double kDefaultCexCrossSection = 5.5e-19;  // m^2

/// Smallest divergence angle the model will use; narrower angles are clamped.
inline constexpr double kMinDivergenceAngle = 1e-3;  // rad

struct PlumeParams {
  double c0 = 0.0;  // fraction of un-attenuated current in the main beam
  double c1 = 0.0;  // main-to-scattered divergence angle ratio
  double c2 = 0.0;  // rad/Pa
  double c3 = 0.0;  // rad
  double c4 = 0.0;  // m^-3/Pa
  double c5 = 0.0;  // m^-3
  double cex_cross_section = kDefaultCexCrossSection;

  static PlumeParams from(const ParameterSet& theta, double cex_cross_section = kDefaultCexCrossSection);
};

/// Facility neutral density seen by the plume: c4 P_B + c5.
double background_neutral_density(double P_B, const PlumeParams& p);

/// Scattered-population divergence angle c2 P_B + c3, clamped into
/// [kMinDivergenceAngle, pi/2]. Throws ParameterRangeError if not finite.
double divergence_angle(double P_B, const PlumeParams& p);

/// Three-population angular ion current density at one pressure and beam
/// current. Construction computes the hemispherical normalizers, so build one
/// model per (I_B, P_B, params) and evaluate it many times.
///
/// With attenuation a(r) = exp(-n_n sigma r):
///   j = a I_B [c0 G_main(phi) + (1 - c0) G_scat(phi)] / r^2 + (1 - a) I_B / (2 pi r^2)
/// where G_x(phi) = exp(-(phi/theta_x)^2) / A_x and A_x normalizes G_x over the
/// hemisphere.
class CurrentDensityModel {
 public:
  CurrentDensityModel(const PlumeParams& params, double beam_current, double background_pressure);

  /// Current density in A/m^2 at radius r (m) and angle phi (rad from the axis).
  double operator()(double r, double phi) const;

  double main_angle() const { return theta_main_; }
  double scatter_angle() const { return theta_scatter_; }
  double neutral_density() const { return neutral_density_; }
  double attenuation(double r) const;
  double main_normalizer() const { return norm_main_; }
  double scatter_normalizer() const { return norm_scatter_; }

 private:
  PlumeParams params_;
  double beam_current_;
  double theta_main_;
  double theta_scatter_;
  double norm_main_;
  double norm_scatter_;
  double neutral_density_;
};

/// 2 pi \int_0^{pi/2} exp(-(phi/theta)^2) sin(phi) dphi.
double hemispherical_normalizer(double theta);

/// Convenience wrapper building a CurrentDensityModel for a single point.
double current_density(double r, double phi, double beam_current, double P_B, const PlumeParams& p);

/// Effective divergence angle from the ratio of axial to total beam current,
///   cos(phi_d) = \int j cos(phi) sin(phi) dphi / \int j sin(phi) dphi.
/// `j` is the angular profile at a fixed radius; the radius cancels.
/// Throws DomainError when the total current vanishes.
double effective_divergence(const std::function<double(double)>& j);

/// Divergence angle of a model profile at radius r, with quadrature breakpoints
/// placed at the model's Gaussian widths.
double effective_divergence(const CurrentDensityModel& model, double r);

/// Same ratio from a sampled profile on an increasing angle grid (trapezoid).
double effective_divergence(std::span<const double> phi, std::span<const double> j);

/// T cos(phi_d).
double corrected_thrust(double thrust, double phi_d);

}  // namespace hallcal::plume
