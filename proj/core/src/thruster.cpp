#include "hallcal/thruster.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "hallcal/errors.hpp"
#include "hallcal/numerics.hpp"

namespace hallcal::thruster {

using constants::boltzmann;
using constants::electron_mass;
using constants::elementary_charge;

// ---------------------------------------------------------------------------
// Configuration types

double ThrusterGeometry::channel_area() const {
  return std::numbers::pi * (outer_radius * outer_radius - inner_radius * inner_radius);
}

void ThrusterGeometry::validate() const {
  if (!(channel_length > 0.0)) throw ConfigError("channel length must be positive");
  if (!(inner_radius > 0.0 && inner_radius < outer_radius)) {
    throw ConfigError("thruster radii must satisfy 0 < inner < outer");
  }
  if (!(domain_length >= channel_length)) throw ConfigError("domain must be at least one channel length");
}

double MagneticProfile::operator()(double z) const {
  const double w = z < z_peak ? width_upstream : width_downstream;
  const double x = (z - z_peak) / w;
  return B_max * std::exp(-x * x);
}

void MagneticProfile::validate() const {
  if (!(B_max > 0.0)) throw ConfigError("B_max must be positive");
  if (!(width_upstream > 0.0 && width_downstream > 0.0)) throw ConfigError("magnetic widths must be positive");
}

RateTable::RateTable(std::vector<double> Te, std::vector<double> k) {
  if (Te.size() < 2 || Te.size() != k.size()) throw ConfigError("rate table needs >= 2 rows of (T_e, k)");
  for (std::size_t i = 0; i < Te.size(); ++i) {
    if (!(k[i] >= 0.0)) throw ConfigError("rate table values must be nonnegative");
    if (i > 0) {
      if (!(Te[i] > Te[i - 1])) throw ConfigError("rate table temperatures must increase");
      if (k[i] < k[i - 1]) throw ConfigError("rate table must be nondecreasing in T_e");
    }
  }
  // Resample onto a uniform grid from 0 to the last tabulated temperature.
  const int n = 4001;
  const double T_max = Te.back();
  dT_ = T_max / (n - 1);
  Te_.resize(n);
  k_.resize(n);
  for (int i = 0; i < n; ++i) {
    Te_[i] = i * dT_;
    k_[i] = numerics::interp_linear(Te, k, Te_[i]);
  }
}

RateTable RateTable::arrhenius(double a, double b, double energy, double T_max, int points) {
  std::vector<double> T(points), k(points);
  for (int i = 0; i < points; ++i) {
    T[i] = T_max * i / (points - 1);
    k[i] = T[i] > 0.0 ? a * std::pow(T[i], b) * std::exp(-energy / T[i]) : 0.0;
  }
  return RateTable(std::move(T), std::move(k));
}

RateTable RateTable::constant(double k, double T_max) {
  return RateTable({0.0, T_max}, {k, k});
}

RateTable RateTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rate table '" + path + "'");
  std::vector<double> T, k;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    double t = 0.0, v = 0.0;
    if (!(ss >> t)) continue;
    if (!(ss >> v)) throw ParseError(path, lineno, "expected two columns (T_e, k)");
    T.push_back(t);
    k.push_back(v);
  }
  return RateTable(std::move(T), std::move(k));
}

double RateTable::operator()(double Te) const {
  if (Te <= 0.0) return k_.front();
  const double x = Te / dT_;
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= k_.size()) return k_.back();
  const double t = x - static_cast<double>(i);
  return k_[i] + t * (k_[i + 1] - k_[i]);
}

double RateTable::slope(double Te) const {
  if (Te <= 0.0) return 0.0;
  const auto i = static_cast<std::size_t>(Te / dT_);
  if (i + 1 >= k_.size()) return 0.0;
  return (k_[i + 1] - k_[i]) / dT_;
}

void PropellantSpec::validate() const {
  if (!(ion_mass > 0.0)) throw ConfigError("propellant ion mass must be positive");
  if (ionization.values().empty()) throw ConfigError("propellant ionization table is empty");
  if (!(ionization_energy_cost >= 0.0)) throw ConfigError("ionization energy cost must be nonnegative");
  if (!(electron_neutral_rate >= 0.0)) throw ConfigError("electron-neutral rate must be nonnegative");
}

// Fit k = a T^b exp(-E_iz/T) through tabulated Maxwellian-averaged rates.
PropellantSpec PropellantSpec::xenon() {
  return {"Xe", 131.293 * constants::atomic_mass_unit, RateTable::arrhenius(6.9e-14, 0.387, 12.13), 30.0, 2.5e-13};
}

PropellantSpec PropellantSpec::krypton() {
  return {"Kr", 83.798 * constants::atomic_mass_unit, RateTable::arrhenius(6.0e-14, 0.40, 14.0), 35.0, 1.8e-13};
}

AnomParams AnomParams::from(const ParameterSet& theta) {
  return {theta[Param::alpha_anom], theta[Param::beta_anom], theta[Param::z_anom], theta[Param::L_anom],
          theta[Param::dz_anom], kShiftCenterPressure};
}

double pressure_shift(const AnomParams& p, double P_B, double channel_length) {
  const double e2 = std::exp(2.0);
  const double logistic = 1.0 / (1.0 + std::exp(-2.0 * (P_B / p.P_0 - 1.0)));
  return p.dz_anom * channel_length * (logistic - 1.0 / (1.0 + e2));
}

double anomalous_inverse_hall(const AnomParams& p, double z_hat, double P_B, double channel_length) {
  if (!(p.L_anom > 0.0)) throw DomainError("anomalous transport width L_anom must be positive");
  const double center = p.z_anom - pressure_shift(p, P_B, channel_length) / channel_length;
  const double x = (z_hat - center) / p.L_anom;
  return p.alpha * (1.0 - p.beta * std::exp(-x * x));
}

double ingestion_flow(double P_B, double T_bg, const ThrusterGeometry& geom, double f_n, double neutral_mass) {
  if (!(P_B >= 0.0)) throw DomainError("background pressure must be nonnegative");
  if (!(T_bg > 0.0)) throw DomainError("background temperature must be positive");
  const double n_bg = P_B / (boltzmann * T_bg);
  const double c_bar = std::sqrt(8.0 * boltzmann * T_bg / (std::numbers::pi * neutral_mass));
  return f_n * geom.channel_area() * 0.25 * n_bg * c_bar * neutral_mass;
}

void SolverSettings::validate() const {
  if (cells < 4) throw ConfigError("solver needs at least 4 cells");
  if (!(duration > 0.0)) throw ConfigError("simulation duration must be positive");
  if (!(averaging_window > 0.0 && averaging_window <= duration)) {
    throw ConfigError("averaging window must lie within the simulated duration");
  }
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("CFL number must lie in (0, 1]");
  if (!(density_floor > 0.0) || !(Te_floor > 0.0)) throw ConfigError("solver floors must be positive");
}

void ThrusterConfig::validate() const {
  geometry.validate();
  field.validate();
  propellant.validate();
  settings.validate();
}

ThrusterParams ThrusterParams::from(const ParameterSet& theta) {
  return {AnomParams::from(theta), theta[Param::u_n], theta[Param::c_w], theta[Param::f_n], theta[Param::T_ec]};
}

void PlasmaState::resize(std::size_t n) {
  for (auto* v : {&z, &n_n, &n_i, &u_i, &T_e, &phi, &E_z}) v->assign(n, 0.0);
}

// ---------------------------------------------------------------------------
// Derived outputs

double thrust_uncorrected(const PlasmaState& s, const ThrusterGeometry& geom, double ion_mass) {
  const std::size_t k = s.size() - 1;
  return geom.channel_area() * ion_mass * s.n_i[k] * s.u_i[k] * s.u_i[k];
}

double discharge_current(const PlasmaState& s, const ThrusterGeometry& geom) {
  return geom.channel_area() * s.j_total;
}

double ion_beam_current(const PlasmaState& s, const ThrusterGeometry& geom) {
  const std::size_t k = s.size() - 1;
  return elementary_charge * s.n_i[k] * s.u_i[k] * geom.channel_area();
}

void write_profile(std::ostream& os, const PlasmaState& s) {
  os << "z n_n n_i u_i T_e phi E_z\n";
  os.precision(10);
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << s.z[i] << ' ' << s.n_n[i] << ' ' << s.n_i[i] << ' ' << s.u_i[i] << ' ' << s.T_e[i] << ' ' << s.phi[i]
       << ' ' << s.E_z[i] << '\n';
  }
}

// ---------------------------------------------------------------------------
// Solver

namespace {

/// Explicit finite-volume integrator for the heavy species with a
/// semi-implicit electron energy update. One instance per run.
class DischargeSolver {
 public:
  DischargeSolver(const ThrusterConfig& cfg, const ThrusterParams& params, const OperatingCondition& cond, double V_cc)
      : cfg_(cfg),
        params_(params),
        cond_(cond),
        V_cc_(V_cc),
        n_(static_cast<std::size_t>(cfg.settings.cells)),
        M_(cfg.propellant.ion_mass),
        area_(cfg.geometry.channel_area()),
        dx_(cfg.geometry.domain_length / static_cast<double>(n_)) {
    allocate();
    setup_static_fields();
    initialize();
  }

  ThrusterOutput run();

 private:
  void allocate();
  void setup_static_fields();
  void initialize();
  void update_electron_transport();
  void compute_fluxes();
  double time_step() const;
  void advance_heavy_species(double dt);
  void advance_energy(double dt);
  void check_finite(long step) const;
  void accumulate(double dt);

  double wall_frequency(double Te) const {
    const double h = cfg_.settings.edge_to_center_base * params_.c_w;
    return 2.0 * h * std::sqrt(elementary_charge * Te / M_) / cfg_.geometry.channel_gap();
  }
  double wall_energy_per_pair(double Te) const {
    const double ratio = (1.0 - cfg_.settings.sheath_see_yield) * std::sqrt(M_ / (2.0 * std::numbers::pi * electron_mass));
    return Te * (2.0 + std::log(std::max(ratio, 1.0)));
  }

  const ThrusterConfig& cfg_;
  ThrusterParams params_;
  OperatingCondition cond_;
  double V_cc_;
  std::size_t n_;
  double M_;
  double area_;
  double dx_;

  double inflow_flux_ = 0.0;  // neutral number flux at the anode, m^-2 s^-1
  double ingested_ = 0.0;

  // state
  std::vector<double> z_, nn_, ni_, mom_, Te_;
  // static per cell
  std::vector<double> wce_, inv_hall_;
  std::vector<char> in_channel_;
  // work arrays
  std::vector<double> ne_, ui_, mu_, grad_, E_, phi_, kiz_, Siz_, Sw_;
  std::vector<double> Fn_, Fm_, Fmom_;  // faces, size n+1
  std::vector<double> lo_, di_, up_, rhs_;
  double j_ = 0.0;

  // accumulators
  double t_avg_ = 0.0;
  double sum_thrust_ = 0.0, sum_ib_ = 0.0, sum_out_ = 0.0, sum_in_ = 0.0;
  std::vector<double> sum_nn_, sum_ni_, sum_ui_, sum_Te_, sum_phi_, sum_E_;
  double sum_j_ = 0.0;
};

void DischargeSolver::allocate() {
  for (auto* v : {&z_, &nn_, &ni_, &mom_, &Te_, &wce_, &inv_hall_, &ne_, &ui_, &mu_, &grad_, &E_, &phi_, &kiz_, &Siz_,
                  &Sw_, &lo_, &di_, &up_, &rhs_, &sum_nn_, &sum_ni_, &sum_ui_, &sum_Te_, &sum_phi_, &sum_E_}) {
    v->assign(n_, 0.0);
  }
  for (auto* v : {&Fn_, &Fm_, &Fmom_}) v->assign(n_ + 1, 0.0);
  in_channel_.assign(n_, 0);
}

void DischargeSolver::setup_static_fields() {
  const auto& g = cfg_.geometry;
  for (std::size_t i = 0; i < n_; ++i) {
    z_[i] = (static_cast<double>(i) + 0.5) * dx_;
    wce_[i] = elementary_charge * cfg_.field(z_[i]) / electron_mass;
    inv_hall_[i] =
        anomalous_inverse_hall(params_.anom, z_[i] / g.channel_length, cond_.background_pressure, g.channel_length);
    in_channel_[i] = z_[i] < g.channel_length ? 1 : 0;
  }
  ingested_ = ingestion_flow(cond_.background_pressure, cfg_.settings.background_temperature, g, params_.f_n, M_);
  inflow_flux_ = (cond_.anode_mass_flow + ingested_) / (M_ * area_);
}

void DischargeSolver::initialize() {
  const auto& s = cfg_.settings;
  const double L = cfg_.geometry.channel_length;
  const double dV = cond_.discharge_voltage - V_cc_;
  const double u_max = std::sqrt(2.0 * elementary_charge * dV / M_);
  const double nn0 = inflow_flux_ / params_.u_n;
  const double ion_flux = cond_.anode_mass_flow / (M_ * area_);
  const double T_peak = std::max(0.1 * dV, 2.0 * s.anode_Te);
  for (std::size_t i = 0; i < n_; ++i) {
    const double z = z_[i];
    const double ramp = 0.5 * (1.0 + std::tanh((z - L) / (0.25 * L)));
    nn_[i] = std::max(nn0 * (0.02 + 0.98 * (1.0 - ramp)), s.density_floor);
    const double u = u_max * (ramp - 0.05);
    const double x = (z - L) / (0.5 * L);
    const double n = ion_flux / std::max(std::abs(u), 0.2 * u_max) * (0.3 + 2.0 * std::exp(-x * x));
    ni_[i] = std::max(n, s.density_floor);
    mom_[i] = ni_[i] * u;
    const double y = (z - L) / (0.4 * L);
    const double T_base = z < L ? s.anode_Te : params_.cathode_Te;
    Te_[i] = std::max(T_base + (T_peak - T_base) * std::exp(-y * y), s.Te_floor);
  }
}

void DischargeSolver::update_electron_transport() {
  const auto& s = cfg_.settings;
  const auto& prop = cfg_.propellant;
  for (std::size_t i = 0; i < n_; ++i) {
    ne_[i] = std::max(ni_[i], s.density_floor);
    ui_[i] = mom_[i] / ne_[i];
    const double nu = nn_[i] * prop.electron_neutral_rate + wce_[i] * inv_hall_[i];
    const double hall = wce_[i] / nu;
    mu_[i] = elementary_charge / (electron_mass * nu) / (1.0 + hall * hall);
    kiz_[i] = prop.ionization(Te_[i]);
  }
  // (1/n) d(n T_e)/dz, one-sided at the ends.
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t l = i == 0 ? 0 : i - 1;
    const std::size_t r = i + 1 == n_ ? i : i + 1;
    const double dp = ne_[r] * Te_[r] - ne_[l] * Te_[l];
    grad_[i] = dp / (static_cast<double>(r - l) * dx_) / ne_[i];
  }
  // Total current from the potential constraint \int E dz = V_d - V_cc.
  double num = cond_.discharge_voltage - V_cc_;
  double den = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    num += (ui_[i] / mu_[i] + grad_[i]) * dx_;
    den += dx_ / (elementary_charge * ne_[i] * mu_[i]);
  }
  j_ = num / den;
  double phi_face = cond_.discharge_voltage;
  for (std::size_t i = 0; i < n_; ++i) {
    E_[i] = (j_ / (elementary_charge * ne_[i]) - ui_[i]) / mu_[i] - grad_[i];
    phi_[i] = phi_face - 0.5 * E_[i] * dx_;
    phi_face -= E_[i] * dx_;
  }
}

void DischargeSolver::compute_fluxes() {
  const double Ti = cfg_.settings.ion_temperature;
  const double ci2 = elementary_charge * Ti / M_;
  const auto sound = [&](std::size_t i) { return std::sqrt(elementary_charge * (Te_[i] + Ti) / M_); };
  const auto rusanov = [&](double nL, double uL, double aL, double nR, double uR, double aR, std::size_t f) {
    const double a = std::max(std::abs(uL) + aL, std::abs(uR) + aR);
    Fm_[f] = 0.5 * (nL * uL + nR * uR) - 0.5 * a * (nR - nL);
    Fmom_[f] = 0.5 * (nL * (uL * uL + ci2) + nR * (uR * uR + ci2)) - 0.5 * a * (nR * uR - nL * uL);
  };
  // Anode: ions enter the sheath at no less than the Bohm speed.
  {
    const double uB = sound(0);
    const double ug = std::min(ui_[0], -uB);
    rusanov(ne_[0], ug, uB, ne_[0], ui_[0], uB, 0);
    Fm_[0] = std::min(Fm_[0], 0.0);
  }
  for (std::size_t f = 1; f < n_; ++f) {
    rusanov(ne_[f - 1], ui_[f - 1], sound(f - 1), ne_[f], ui_[f], sound(f), f);
  }
  // Cathode side: zero-gradient extrapolation gives the physical flux.
  {
    const std::size_t k = n_ - 1;
    Fm_[n_] = ne_[k] * ui_[k];
    Fmom_[n_] = ne_[k] * (ui_[k] * ui_[k] + ci2);
  }
  // Neutrals: first-order upwind at the constant speed u_n. Ions reaching the
  // anode recombine and return as neutrals.
  Fn_[0] = inflow_flux_ - Fm_[0];
  for (std::size_t f = 1; f <= n_; ++f) Fn_[f] = nn_[f - 1] * params_.u_n;
}

double DischargeSolver::time_step() const {
  const double Ti = cfg_.settings.ion_temperature;
  double max_speed = params_.u_n;
  double max_rate = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double a = std::abs(ui_[i]) + std::sqrt(elementary_charge * (Te_[i] + Ti) / M_);
    max_speed = std::max(max_speed, a);
    max_rate = std::max(max_rate, ne_[i] * kiz_[i]);
  }
  double dt = cfg_.settings.cfl * dx_ / max_speed;
  if (max_rate > 0.0) dt = std::min(dt, 0.5 / max_rate);
  return dt;
}

void DischargeSolver::advance_heavy_species(double dt) {
  const auto& s = cfg_.settings;
  const bool ion_wall_loss = !cfg_.geometry.wall_shielded;
  const double force = elementary_charge / M_;
  for (std::size_t i = 0; i < n_; ++i) {
    Siz_[i] = ne_[i] * nn_[i] * kiz_[i];
    Sw_[i] = (ion_wall_loss && in_channel_[i]) ? wall_frequency(Te_[i]) * ne_[i] : 0.0;
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const double dn = -(Fm_[i + 1] - Fm_[i]) / dx_ + Siz_[i] - Sw_[i];
    const double dm =
        -(Fmom_[i + 1] - Fmom_[i]) / dx_ + Siz_[i] * params_.u_n + force * ne_[i] * E_[i] - Sw_[i] * ui_[i];
    const double dnn = -(Fn_[i + 1] - Fn_[i]) / dx_ - Siz_[i] + Sw_[i];
    ni_[i] += dt * dn;
    mom_[i] += dt * dm;
    nn_[i] += dt * dnn;
    if (ni_[i] < s.density_floor) {
      const double u = mom_[i] / std::max(ni_[i], s.density_floor);
      ni_[i] = s.density_floor;
      mom_[i] = s.density_floor * std::clamp(u, -1e5, 1e5);
    }
    nn_[i] = std::max(nn_[i], s.density_floor);
  }
}

// Backward Euler in T_e for
//   3/2 d(n T)/dt + d/dz[5/2 Gamma_e T - kappa dT/dz] = Q_ohm - W_iz - W_wall
// with kappa = 5/2 n T mu, upwinded advection and losses linearized about the
// previous temperature.
void DischargeSolver::advance_energy(double dt) {
  const auto& s = cfg_.settings;
  const auto& prop = cfg_.propellant;
  const double T_anode = s.anode_Te;
  const double T_cathode = params_.cathode_Te;
  const double je = j_ / elementary_charge;
  const bool shielded = cfg_.geometry.wall_shielded;
  const double inv_dx = 1.0 / dx_;

  for (std::size_t i = 0; i < n_; ++i) {
    const double ne_new = std::max(ni_[i], s.density_floor);
    const double Told = Te_[i];
    lo_[i] = 0.0;
    up_[i] = 0.0;
    di_[i] = 1.5 * ne_new / dt;
    rhs_[i] = 1.5 * ne_[i] * Told / dt + (je - ne_[i] * ui_[i]) * E_[i];

    double loss = ne_new * nn_[i] * kiz_[i] * prop.ionization_energy_cost;
    double dloss = ne_new * nn_[i] * prop.ionization.slope(Told) * prop.ionization_energy_cost;
    if (in_channel_[i]) {
      const double Tw = shielded ? T_anode : Told;
      const double w = ne_new * wall_frequency(Tw) * wall_energy_per_pair(Tw);
      loss += w;
      if (!shielded) dloss += 1.5 * w / Told;
    }
    di_[i] += dloss;
    rhs_[i] += -loss + dloss * Told;
  }

  const auto kappa = [&](std::size_t i) { return 2.5 * ne_[i] * Te_[i] * mu_[i]; };
  for (std::size_t f = 0; f <= n_; ++f) {
    const double A = 2.5 * (Fm_[f] - je);
    const bool left_ghost = f == 0;
    const bool right_ghost = f == n_;
    double k = 0.0;
    double h = dx_;
    if (left_ghost) {
      k = kappa(0);
      h = 0.5 * dx_;
    } else if (right_ghost) {
      k = kappa(n_ - 1);
      h = 0.5 * dx_;
    } else {
      k = 0.5 * (kappa(f - 1) + kappa(f));
    }
    const double d = k / h * inv_dx;
    // Face f contributes +G_f/dx to cell f-1 and -G_f/dx to cell f.
    if (!left_ghost) {
      const std::size_t L = f - 1;
      if (A >= 0.0) {
        di_[L] += A * inv_dx;
      } else if (right_ghost) {
        rhs_[L] -= A * inv_dx * T_cathode;
      } else {
        up_[L] += A * inv_dx;
      }
      di_[L] += d;
      if (right_ghost) {
        rhs_[L] += d * T_cathode;
      } else {
        up_[L] -= d;
      }
    }
    if (!right_ghost) {
      const std::size_t R = f;
      if (A < 0.0) {
        di_[R] -= A * inv_dx;
      } else if (left_ghost) {
        rhs_[R] += A * inv_dx * T_anode;
      } else {
        lo_[R] -= A * inv_dx;
      }
      di_[R] += d;
      if (left_ghost) {
        rhs_[R] += d * T_anode;
      } else {
        lo_[R] -= d;
      }
    }
  }
  numerics::solve_tridiagonal(lo_, di_, up_, rhs_);
  for (std::size_t i = 0; i < n_; ++i) Te_[i] = std::max(rhs_[i], s.Te_floor);
}

void DischargeSolver::check_finite(long step) const {
  if (!std::isfinite(j_)) throw SolverDivergence(step, "j_total", "non-finite discharge current density");
  const auto scan = [&](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i])) {
        throw SolverDivergence(step, name, "non-finite value in cell " + std::to_string(i));
      }
    }
  };
  scan(nn_, "n_n");
  scan(ni_, "n_i");
  scan(mom_, "n_i u_i");
  scan(Te_, "T_e");
}

void DischargeSolver::accumulate(double dt) {
  const std::size_t k = n_ - 1;
  t_avg_ += dt;
  sum_thrust_ += dt * area_ * M_ * ne_[k] * ui_[k] * ui_[k];
  sum_ib_ += dt * elementary_charge * ne_[k] * ui_[k] * area_;
  sum_out_ += dt * M_ * area_ * (Fm_[n_] + Fn_[n_]);
  sum_in_ += dt * (cond_.anode_mass_flow + ingested_);
  sum_j_ += dt * j_;
  for (std::size_t i = 0; i < n_; ++i) {
    sum_nn_[i] += dt * nn_[i];
    sum_ni_[i] += dt * ne_[i];
    sum_ui_[i] += dt * ui_[i];
    sum_Te_[i] += dt * Te_[i];
    sum_phi_[i] += dt * phi_[i];
    sum_E_[i] += dt * E_[i];
  }
}

ThrusterOutput DischargeSolver::run() {
  const auto& s = cfg_.settings;
  const double t_end = s.duration;
  const double t_avg_start = s.duration - s.averaging_window;
  const auto wall_start = std::chrono::steady_clock::now();

  double t = 0.0;
  long step = 0;
  while (t < t_end) {
    update_electron_transport();
    compute_fluxes();
    double dt = time_step();
    if (t < t_avg_start && t + dt > t_avg_start) dt = t_avg_start - t;
    if (t + dt > t_end) dt = t_end - t;
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw SolverDivergence(step, "dt", "time step collapsed to " + std::to_string(dt));
    }
    if (t >= t_avg_start) accumulate(dt);
    advance_heavy_species(dt);
    advance_energy(dt);
    check_finite(step);
    t += dt;
    ++step;
    if ((step & 255) == 0) {
      const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
      if (elapsed > s.wall_clock_limit) {
        throw SolverTimeout("discharge solve exceeded " + std::to_string(s.wall_clock_limit) + " s wall clock at t = " +
                            std::to_string(t) + " s");
      }
    }
  }

  ThrusterOutput out;
  const double inv = 1.0 / t_avg_;
  out.thrust_uncorrected = sum_thrust_ * inv;
  out.ion_beam_current = sum_ib_ * inv;
  out.mass_inflow = sum_in_ * inv;
  out.mass_outflow = sum_out_ * inv;
  out.ingested_flow = ingested_;
  out.window_start = t_avg_start;
  out.window_end = t_end;
  out.steps = step;
  auto& a = out.averaged;
  a.resize(n_);
  a.z = z_;
  for (std::size_t i = 0; i < n_; ++i) {
    a.n_n[i] = sum_nn_[i] * inv;
    a.n_i[i] = sum_ni_[i] * inv;
    a.u_i[i] = sum_ui_[i] * inv;
    a.T_e[i] = sum_Te_[i] * inv;
    a.phi[i] = sum_phi_[i] * inv;
    a.E_z[i] = sum_E_[i] * inv;
  }
  a.j_total = sum_j_ * inv;
  out.discharge_current = discharge_current(a, cfg_.geometry);
  out.z = a.z;
  out.u_ion = a.u_i;
  return out;
}

}  // namespace

ThrusterOutput solve_discharge(const ThrusterConfig& config, const ThrusterParams& params,
                               const OperatingCondition& cond, double V_cc) {
  config.validate();
  cond.validate();
  if (!(V_cc < cond.discharge_voltage)) throw DomainError("coupling voltage must be below the discharge voltage");
  if (!(params.u_n > 0.0)) throw DomainError("neutral speed must be positive");
  if (!(params.cathode_Te > 0.0)) throw DomainError("cathode electron temperature must be positive");
  DischargeSolver solver(config, params, cond, V_cc);
  return solver.run();
}

}  // namespace hallcal::thruster
