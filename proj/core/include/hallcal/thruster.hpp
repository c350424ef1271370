#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hallcal/params.hpp"
#include "hallcal/units.hpp"

namespace hallcal::thruster {

/// Center pressure of the logistic acceleration-region shift.
inline constexpr double kShiftCenterPressure = 25e-6 * units::torr;  // Pa

struct ThrusterGeometry {
  double channel_length = 0.025;  // m
  double inner_radius = 0.0345;   // m
  double outer_radius = 0.05;     // m
  double domain_length = 0.075;   // m, defaults to 3 channel lengths
  bool wall_shielded = false;

  double channel_area() const;
  double channel_gap() const { return outer_radius - inner_radius; }
  void validate() const;
};

/// Two-sided Gaussian radial field B(z) = B_max exp(-((z - z_peak)/w)^2),
/// with w = width_upstream for z < z_peak and width_downstream otherwise.
struct MagneticProfile {
  double B_max = 0.016;            // T
  double z_peak = 0.025;           // m
  double width_upstream = 0.015;   // m
  double width_downstream = 0.02;  // m

  double operator()(double z) const;
  void validate() const;
};

/// Rate coefficient table k(T_e) in m^3/s, resampled onto a uniform grid for
/// O(1) lookup. Linear interpolation inside, clamped outside.
class RateTable {
 public:
  RateTable() = default;
  RateTable(std::vector<double> Te, std::vector<double> k);

  /// k(T) = a T^b exp(-E/T) on [0, T_max]; monotone increasing for b >= 0, E > 0.
  static RateTable arrhenius(double a, double b, double energy, double T_max = 500.0, int points = 5001);
  static RateTable constant(double k, double T_max = 500.0);
  /// Two-column text table (T_e in eV, k in m^3/s); '#' starts a comment.
  static RateTable load(const std::string& path);

  double operator()(double Te) const;
  double slope(double Te) const;
  const std::vector<double>& temperatures() const { return Te_; }
  const std::vector<double>& values() const { return k_; }

 private:
  std::vector<double> Te_;
  std::vector<double> k_;
  double dT_ = 1.0;
};

struct PropellantSpec {
  std::string species_name;
  double ion_mass = 0.0;                // kg
  RateTable ionization;                 // m^3/s vs eV
  double ionization_energy_cost = 0.0;  // eV lost per ionization, excitation included
  double electron_neutral_rate = 0.0;   // momentum-transfer rate coefficient, m^3/s

  void validate() const;

  static PropellantSpec xenon();
  static PropellantSpec krypton();
};

/// Parameters of the anomalous inverse Hall parameter profile.
struct AnomParams {
  double alpha = 0.0;
  double beta = 0.0;
  double z_anom = 1.0;   // channel lengths
  double L_anom = 0.25;  // channel lengths
  double dz_anom = 0.0;  // channel lengths
  double P_0 = kShiftCenterPressure;

  static AnomParams from(const ParameterSet& theta);
};

/// Upstream displacement of the anomalous-transport trough (m):
///   dz(P_B) = dz_anom L_ch [1/(1 + exp(-2(P_B/P_0 - 1))) - 1/(1 + e^2)]
double pressure_shift(const AnomParams& p, double P_B, double channel_length);

/// alpha (1 - beta exp(-((z_hat - c)/L_anom)^2)) with c = z_anom - dz(P_B)/L_ch.
/// Multiply by the electron cyclotron frequency to get nu_anom.
double anomalous_inverse_hall(const AnomParams& p, double z_hat, double P_B, double channel_length);

/// Mass flow (kg/s) of facility neutrals crossing the exit plane as the
/// one-sided flux of a stationary Maxwellian, scaled by f_n.
double ingestion_flow(double P_B, double T_bg, const ThrusterGeometry& geom, double f_n, double neutral_mass);

struct SolverSettings {
  int cells = 100;
  double duration = 1e-3;          // s of simulated time
  double averaging_window = 5e-4;  // s, trailing
  double cfl = 0.8;
  double wall_clock_limit = 60.0;  // s
  double density_floor = 1e12;     // m^-3
  double Te_floor = 0.1;           // eV
  double ion_temperature = 0.1;    // eV
  double anode_Te = 3.0;           // eV
  double background_temperature = 300.0;  // K
  double sheath_see_yield = 0.5;   // effective secondary emission in the wall sheath
  double edge_to_center_base = 0.5;

  void validate() const;
};

struct ThrusterConfig {
  ThrusterGeometry geometry;
  MagneticProfile field;
  PropellantSpec propellant = PropellantSpec::xenon();
  SolverSettings settings;

  void validate() const;
};

/// Calibrated thruster inputs.
struct ThrusterParams {
  AnomParams anom;
  double u_n = 300.0;  // neutral axial speed, m/s
  double c_w = 1.0;    // wall-loss scale
  double f_n = 1.0;    // ingestion scale
  double cathode_Te = 2.0;  // eV, electron temperature at the cathode boundary

  static ThrusterParams from(const ParameterSet& theta);
};

/// Cell-centered 1-D plasma fields.
struct PlasmaState {
  std::vector<double> z;    // m
  std::vector<double> n_n;  // m^-3
  std::vector<double> n_i;  // m^-3
  std::vector<double> u_i;  // m/s
  std::vector<double> T_e;  // eV
  std::vector<double> phi;  // V
  std::vector<double> E_z;  // V/m
  double j_total = 0.0;     // A/m^2, uniform

  std::size_t size() const { return z.size(); }
  void resize(std::size_t n);
};

struct ThrusterOutput {
  double thrust_uncorrected = 0.0;  // N
  double discharge_current = 0.0;   // A
  double ion_beam_current = 0.0;    // A
  std::vector<double> z;            // m, cell centers
  std::vector<double> u_ion;        // m/s, time-averaged
  double window_start = 0.0;        // s
  double window_end = 0.0;          // s
  long steps = 0;
  double mass_inflow = 0.0;   // kg/s, anode + ingested, time-averaged
  double mass_outflow = 0.0;  // kg/s through the exit plane, time-averaged
  double ingested_flow = 0.0;  // kg/s
  PlasmaState averaged;
};

/// Integrate the discharge and return outputs averaged over the trailing window.
/// Throws SolverDivergence on a non-finite state and SolverTimeout when the
/// wall-clock budget runs out.
ThrusterOutput solve_discharge(const ThrusterConfig& config, const ThrusterParams& params,
                               const OperatingCondition& cond, double V_cc);

/// Ion momentum flux through the exit: A m n_i u_i^2 at the last cell.
double thrust_uncorrected(const PlasmaState& s, const ThrusterGeometry& geom, double ion_mass);
/// A j_total.
double discharge_current(const PlasmaState& s, const ThrusterGeometry& geom);
/// e n_i u_i A at the last cell.
double ion_beam_current(const PlasmaState& s, const ThrusterGeometry& geom);

/// Whitespace-separated columns z n_n n_i u_i T_e phi E_z with a header line.
void write_profile(std::ostream& os, const PlasmaState& s);

}  // namespace hallcal::thruster
