#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/tools/toms748_solve.hpp>

#include "fixtures.hpp"
#include "hallcal/cathode.hpp"
#include "hallcal/datasets.hpp"
#include "hallcal/inference.hpp"
#include "hallcal/numerics.hpp"
#include "hallcal/plume.hpp"
#include "hallcal/system.hpp"
#include "hallcal/thruster.hpp"
#include "hallcal/uq.hpp"

namespace {

using namespace hallcal;
using Clock = std::chrono::steady_clock;

constexpr double kHalfPi = std::numbers::pi / 2.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome cathode_closed_form() {
  Outcome o;
  Rng rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_vac = 0.0;
  double worst_peak = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cathode::CathodeParams p{10.0 + 50.0 * u(rng), 1.0 + 5.0 * u(rng), units::utorr_to_pa(10.0 + 90.0 * u(rng)),
                                   units::utorr_to_pa(10.0 + 190.0 * u(rng))};
    worst_vac = std::max(worst_vac, rel(cathode::coupling_voltage(p, 0.0), p.V_vac));
    const auto slope = [&](double P) { return cathode::coupling_voltage_slope(p, P); };
    std::uintmax_t iters = 200;
    const auto bracket = boost::math::tools::toms748_solve(slope, 0.0, 20.0 * p.P_star,
                                                           boost::math::tools::eps_tolerance<double>(50), iters);
    const double peak = 0.5 * (bracket.first + bracket.second);
    worst_peak = std::max(worst_peak, rel(peak, p.P_star));
    const double v = cathode::coupling_voltage(p, p.P_star);
    o.check(v >= cathode::coupling_voltage(p, 0.999 * p.P_star) && v >= cathode::coupling_voltage(p, 1.001 * p.P_star),
            "P_star is not a local maximum");
  }
  o.check(worst_vac <= 1e-12, "V_cc(0) off by " + num(worst_vac));
  o.check(worst_peak <= 1e-6, "maximum off by " + num(worst_peak));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("worst V_cc(0) rel ") + num(worst_vac) +
              ", worst peak rel " + num(worst_peak);
  return o;
}

Outcome anomalous_transport() {
  Outcome o;
  const double L = 0.025;
  Rng rng(102);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    thruster::AnomParams p;
    p.alpha = 0.01 + 0.1 * u(rng);
    p.beta = u(rng);
    p.z_anom = 0.8 + 0.6 * u(rng);
    p.L_anom = 0.1 + 0.5 * u(rng);
    p.dz_anom = 0.5 * u(rng);
    for (double P_utorr : {0.0, 5.0, 25.0, 50.0}) {
      const double P = units::utorr_to_pa(P_utorr);
      const double center = p.z_anom - thruster::pressure_shift(p, P, L) / L;
      const double trough = thruster::anomalous_inverse_hall(p, center, P, L);
      o.check(std::abs(trough - p.alpha * (1.0 - p.beta)) <= 1e-12, "trough value");
    }
    o.check(thruster::pressure_shift(p, 0.0, L) == 0.0, "shift at zero pressure is not exactly zero");
    double prev = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double dz = thruster::pressure_shift(p, units::utorr_to_pa(0.5 * k), L);
      if (dz < prev) o.check(false, "shift decreases with pressure");
      prev = dz;
    }
    const double at_p0 = thruster::pressure_shift(p, p.P_0, L);
    const double expected = p.dz_anom * L * (0.5 - 1.0 / (1.0 + std::exp(2.0)));
    o.check(std::abs(at_p0 - expected) <= 1e-12, "shift at P_0 off by " + num(at_p0 - expected));
  }
  return o;
}

Outcome plume_conservation() {
  Outcome o;
  Rng rng(103);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    plume::PlumeParams p;
    p.c0 = u(rng);
    p.c1 = 0.1 + 0.8 * u(rng);
    p.c2 = -15.0 + 30.0 * u(rng);
    p.c3 = 0.2 + 1.3 * u(rng);
    p.c4 = std::pow(10.0, 18.0 + 4.0 * u(rng));
    p.c5 = std::pow(10.0, 14.0 + 4.0 * u(rng));
    const double P_B = units::utorr_to_pa(1.0 + 99.0 * u(rng));
    const double I_B = 1.0 + 9.0 * u(rng);
    const double r = 0.5 + 1.5 * u(rng);
    const plume::CurrentDensityModel m(p, I_B, P_B);
    std::vector<double> breaks{0.0, kHalfPi};
    for (double w : {m.main_angle(), m.scatter_angle()}) {
      for (double k : {1.0, 3.0, 8.0}) {
        if (k * w < kHalfPi) breaks.push_back(k * w);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      total += numerics::integrate([&](double phi) { return m(r, phi) * std::sin(phi); }, breaks[k], breaks[k + 1],
                                   1e-12, 0.0)
                   .value;
    }
    total *= 2.0 * std::numbers::pi * r * r;
    worst = std::max(worst, rel(total, I_B));
  }
  o.check(worst <= 1e-6, "current not conserved");
  const double cos_d = std::cos(plume::effective_divergence([](double) { return 1.0; }));
  o.check(std::abs(cos_d - 0.5) <= 1e-6, "uniform cos = " + num(cos_d));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("worst rel ") + num(worst) + ", uniform cos " + num(cos_d);
  return o;
}

thruster::ThrusterOutput run_reference(const thruster::ThrusterConfig& cfg, const ParameterSet& theta,
                                       const OperatingCondition& cond) {
  const double V_cc = cathode::coupling_voltage(cathode::CathodeParams::from(theta), cond.background_pressure);
  return thruster::solve_discharge(cfg, thruster::ThrusterParams::from(theta), cond, V_cc);
}

Outcome solver_bounds() {
  Outcome o;
  const thruster::ThrusterConfig cfg = testing::reference_thruster();
  const auto theta = testing::reference_theta();
  const auto cond = testing::reference_condition();
  const auto t0 = Clock::now();
  const auto out = run_reference(cfg, theta, cond);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  const double v_max = std::sqrt(2.0 * constants::elementary_charge * cond.discharge_voltage / cfg.propellant.ion_mass);
  const double u_exit = out.u_ion.back();
  o.check(u_exit <= 2.1e4 && u_exit <= v_max, "exit velocity " + num(u_exit));
  o.check(u_exit > 0.0, "no acceleration");
  const double balance = rel(out.mass_outflow, out.mass_inflow);
  o.check(balance <= 0.02, "mass balance " + num(balance));
  const double I_from_j = thruster::discharge_current(out.averaged, cfg.geometry);
  o.check(out.discharge_current == I_from_j &&
              I_from_j == cfg.geometry.channel_area() * out.averaged.j_total,
          "discharge current is not A j");
  o.check(secs <= 10.0, "run took " + num(secs) + " s");
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("u_exit ") + num(u_exit) + " m/s, mass balance " +
              num(balance) + ", I_D " + num(out.discharge_current) + " A, " + num(secs) + " s";
  return o;
}

double half_rise_location(const thruster::ThrusterOutput& out) {
  const double half = 0.5 * out.u_ion.back();
  for (std::size_t i = 1; i < out.u_ion.size(); ++i) {
    if (out.u_ion[i] >= half) {
      const double t = (half - out.u_ion[i - 1]) / (out.u_ion[i] - out.u_ion[i - 1]);
      return out.z[i - 1] + t * (out.z[i] - out.z[i - 1]);
    }
  }
  return out.z.back();
}

Outcome pressure_shift_behavior() {
  Outcome o;
  const auto theta = testing::reference_theta();
  o.check(theta[Param::dz_anom] > 0.0, "fixture needs a positive shift");
  double prev = 1e9;
  std::string zs;
  for (double P : {5.0, 25.0, 50.0}) {
    const double z = half_rise_location(run_reference(testing::reference_thruster(), theta, testing::reference_condition(P)));
    o.check(z < prev, "half-rise did not move upstream at " + num(P) + " uTorr");
    zs += (zs.empty() ? "" : ", ") + num(1e3 * z);
    prev = z;
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("half-rise z [mm]: ") + zs;
  return o;
}

Outcome dram_correctness() {
  Outcome o;
  const int d = 5;
  Eigen::VectorXd mu(d);
  mu << 1.0, -1.0, 0.5, 2.0, 0.0;
  const Eigen::VectorXd sd = (Eigen::VectorXd(d) << 1.0, 2.0, 0.5, 3.0, 1.5).finished();
  Eigen::MatrixXd sigma(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) sigma(i, j) = std::pow(0.6, std::abs(i - j)) * sd(i) * sd(j);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  const auto gaussian = [&](std::span<const double> x) {
    const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(x.data(), d) - mu;
    return -0.5 * r.dot(llt.solve(r));
  };
  inference::DramConfig cfg;
  cfg.n_samples = 50000;
  cfg.seed = 20261015;
  const auto chain = inference::dram_sample(gaussian, std::vector<double>(d, 0.0), cfg);
  const std::size_t b = chain.burn_in_end();
  const auto n = static_cast<Eigen::Index>(chain.size() - b);
  Eigen::MatrixXd X(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) X(i, j) = chain.samples[b + static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd m = X.colwise().mean();
  const Eigen::MatrixXd centered = X.rowwise() - m.transpose();
  const Eigen::MatrixXd C = centered.transpose() * centered / static_cast<double>(n);
  double worst_mean = 0.0;
  double worst_cov = 0.0;
  for (int i = 0; i < d; ++i) {
    worst_mean = std::max(worst_mean, std::abs(m(i) - mu(i)) / sd(i));
    for (int j = 0; j < d; ++j) worst_cov = std::max(worst_cov, std::abs(C(i, j) - sigma(i, j)) / (sd(i) * sd(j)));
  }
  o.check(worst_mean <= 0.05, "mean error " + num(worst_mean) + " sigma");
  o.check(worst_cov <= 0.10, "covariance error " + num(worst_cov));

  const std::vector<double> weights{0.2, 0.3, 0.5};
  const auto discrete = [&](std::span<const double> x) {
    if (!(x[0] >= 0.0 && x[0] < 3.0)) return -std::numeric_limits<double>::infinity();
    return std::log(weights[static_cast<std::size_t>(x[0])]);
  };
  inference::DramConfig dcfg;
  dcfg.n_samples = 1000000;
  dcfg.seed = 20261015;
  const auto dchain = inference::dram_sample(discrete, {1.5}, dcfg);
  std::vector<double> freq(3, 0.0);
  const std::size_t db = dchain.burn_in_end();
  for (std::size_t i = db; i < dchain.size(); ++i) freq[static_cast<std::size_t>(dchain.samples[i][0])] += 1.0;
  double worst_freq = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    freq[k] /= static_cast<double>(dchain.size() - db);
    worst_freq = std::max(worst_freq, std::abs(freq[k] - weights[k]));
  }
  o.check(worst_freq <= 0.01, "state frequency error " + num(worst_freq));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("mean err ") + num(worst_mean) + " sigma, cov err " +
              num(worst_cov) + ", frequencies " + num(freq[0]) + "/" + num(freq[1]) + "/" + num(freq[2]);
  return o;
}

datasets::Dataset scalar_dataset(std::vector<double> values) {
  datasets::Dataset ds;
  ds.name = "fixture";
  ds.thruster_id = "fixture";
  for (std::size_t i = 0; i < values.size(); ++i) {
    datasets::Observation obs;
    obs.qoi = datasets::QoI::I_D;
    obs.condition = {300.0 + static_cast<double>(i), 1e-3, 5e-6};
    obs.values = {values[i]};
    ds.observations.push_back(obs);
  }
  return ds;
}

Outcome likelihood_arithmetic() {
  Outcome o;
  const auto scaled = [](double s) {
    return [s](const datasets::Observation& obs) {
      std::vector<double> f;
      for (double y : obs.values) f.push_back(s * y);
      return f;
    };
  };
  const std::vector<datasets::Dataset> one{scalar_dataset({1.0})};
  const double ll = inference::log_likelihood(
      one, [](const datasets::Observation&) { return std::vector<double>{0.9}; }, {});
  o.check(std::abs(ll + 8.0) <= 1e-12, "single observation scores " + num(ll));
  const std::vector<datasets::Dataset> many{scalar_dataset({4.2, 4.5, 3.9, 5.1})};
  o.check(inference::log_likelihood(many, scaled(1.0), {}) == 0.0, "perfect fit is not zero");
  const double base = inference::log_likelihood(many, scaled(1.07), {});
  double worst = 0.0;
  for (double k : {1e-6, 1e-3, 0.5, 7.0, 1e4}) {
    std::vector<datasets::Dataset> rescaled = many;
    for (auto& obs : rescaled[0].observations) obs.values[0] *= k;
    worst = std::max(worst, rel(inference::log_likelihood(rescaled, scaled(1.07), {}), base));
  }
  o.check(worst <= 1e-12, "rescaling changes the score by " + num(worst));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("fixture ") + num(ll) + ", rescaling rel " + num(worst);
  return o;
}

Outcome synthetic_recovery() {
  Outcome o;
  const auto truth = testing::reference_theta();
  const system::SystemModel model(testing::fast_system(), 1 << 14);

  datasets::SynthesisSpec spec;
  spec.name = "recovery";
  spec.thruster_id = "SPT-100";
  for (double P : {5.0, 15.0, 25.0, 40.0, 60.0}) spec.conditions.push_back(testing::reference_condition(P));
  spec.qois = {datasets::QoI::V_cc, datasets::QoI::I_D, datasets::QoI::T_c, datasets::QoI::u_ion,
               datasets::QoI::j_ion};
  const auto grid = uq::solver_grid(testing::fast_thruster());
  for (std::size_t i = grid.size() / 5; i < grid.size(); i += 4) spec.u_ion_z.push_back(grid[i]);
  system::JionSweep sweep;
  for (int k = 0; k <= 18; ++k) sweep.angles.push_back(k * std::numbers::pi / 36.0);
  spec.j_ion = {sweep};
  spec.noise_percent = 2.0;
  spec.seed = 8;
  const auto data = datasets::synthesize_dataset(model, truth, spec);

  const auto priors = default_priors();
  const inference::Posterior posterior(model, {data}, priors, {});
  Rng rng(20261015);
  auto x0 = to_sampling_space(truth, priors);
  const auto widths = prior_widths_sampling(priors);
  const auto mid = to_sampling_space(prior_midpoint(priors), priors);
  std::uniform_real_distribution<double> jitter(0.0, 0.02);
  for (std::size_t j = 0; j < kNumParams; ++j) x0[j] += std::copysign(jitter(rng) * widths[j], mid[j] - x0[j]);
  const auto init = from_sampling_space(x0, priors);

  inference::DramConfig cfg;
  cfg.n_samples = 5000;
  cfg.seed = 20261015;
  const auto chain = inference::calibrate(posterior, init, cfg);
  const auto retained = inference::retained_parameters(chain);

  std::string ci;
  for (Param p : {Param::V_vac, Param::alpha_anom, Param::z_anom, Param::c3}) {
    std::vector<double> col;
    for (const auto& t : retained) col.push_back(t[p]);
    std::sort(col.begin(), col.end());
    const double lo = numerics::quantile_sorted(col, 0.05);
    const double hi = numerics::quantile_sorted(col, 0.95);
    const double v = truth[p];
    o.check(lo <= v && v <= hi, std::string(param_name(p)) + " outside its 90% interval");
    ci += std::string(ci.empty() ? "" : ", ") + std::string(param_name(p)) + " [" + num(lo) + ", " + num(hi) + "]";
  }

  std::vector<ParameterSet> post_draws;
  std::uniform_int_distribution<std::size_t> pick(0, retained.size() - 1);
  for (int i = 0; i < 200; ++i) post_draws.push_back(retained[pick(rng)]);
  std::vector<ParameterSet> prior_draws;
  for (int i = 0; i < 200; ++i) prior_draws.push_back(sample_prior(priors, rng));
  const auto xi = uq::nominal_errors(data, {});
  const auto post_metrics = uq::error_metrics(model, post_draws, data, xi);
  const auto prior_metrics = uq::error_metrics(model, prior_draws, data, xi);
  std::string errs;
  for (std::size_t k = 0; k < post_metrics.size(); ++k) {
    const auto name = std::string(datasets::qoi_name(post_metrics[k].qoi));
    o.check(post_metrics[k].mu50 < 2.0 * 0.02, name + " median error " + num(post_metrics[k].mu50));
    o.check(post_metrics[k].mu < prior_metrics[k].mu, name + " posterior mu not below prior mu");
    errs += (errs.empty() ? "" : ", ") + name + " mu50 " + num(post_metrics[k].mu50) + " mu " +
            num(post_metrics[k].mu) + "/" + num(prior_metrics[k].mu);
  }
  const double acc = static_cast<double>(chain.stage1_accepts + chain.stage2_accepts) / static_cast<double>(chain.size());
  o.detail += (o.detail.empty() ? "" : "; ") + ci + "; " + errs + "; acceptance " + num(acc);
  return o;
}

Outcome uq_mechanics() {
  Outcome o;
  const uq::ModelFn toy = [](const ParameterSet& theta, const OperatingCondition& c)
      -> std::optional<std::vector<std::vector<double>>> {
    const double thrust = 1e-3 * (theta[Param::V_vac] + 0.25 * c.discharge_voltage) + 1e4 * c.anode_mass_flow;
    std::vector<double> profile;
    for (int k = 0; k < 5; ++k) profile.push_back(theta[Param::T_ec] * k + 1e-3 * c.discharge_voltage);
    return std::vector<std::vector<double>>{{thrust}, profile};
  };
  const std::vector<uq::Channel> channels{{"T", {}}, {"profile", {0, 1, 2, 3, 4}}};
  Rng rng(104);
  std::normal_distribution<double> n1(30.0, 2.0);
  std::normal_distribution<double> n2(3.0, 0.3);
  std::vector<ParameterSet> post(5000);
  for (auto& t : post) {
    t[Param::V_vac] = n1(rng);
    t[Param::T_ec] = n2(rng);
  }
  const std::vector<OperatingCondition> conds{{300.0, units::utorr_to_pa(5.0), 5e-6},
                                              {250.0, units::utorr_to_pa(25.0), 4e-6}};
  uq::PredictOptions opt;
  opt.n_samples = 20000;
  opt.seed = 105;
  opt.mode = uq::Mode::epistemic;
  const auto epi = uq::posterior_predict(post, conds, channels, toy, opt);
  opt.mode = uq::Mode::total;
  const auto tot = uq::posterior_predict(post, conds, channels, toy, opt);
  const auto var = [](const std::vector<std::vector<double>>& s) {
    double m = 0.0, v = 0.0;
    for (const auto& x : s) m += x[0];
    m /= static_cast<double>(s.size());
    for (const auto& x : s) v += (x[0] - m) * (x[0] - m);
    return v / static_cast<double>(s.size());
  };
  std::string vs;
  for (std::size_t c = 0; c < conds.size(); ++c) {
    const double ve = var(epi.conditions[c].channels[0].samples);
    const double vt = var(tot.conditions[c].channels[0].samples);
    const double s_v = opt.aleatoric.discharge_voltage * conds[c].discharge_voltage * 0.25e-3;
    const double s_m = opt.aleatoric.anode_mass_flow * conds[c].anode_mass_flow * 1e4;
    const double va = s_v * s_v + s_m * s_m;
    o.check(vt >= ve, "total variance below epistemic");
    o.check(rel(vt, ve + va) <= 0.10, "total variance " + num(vt) + " vs " + num(ve + va));
    vs += (vs.empty() ? "" : ", ") + num(ve) + " -> " + num(vt);
  }
  for (const auto* ens : {&epi, &tot}) {
    for (const auto& cp : ens->conditions) {
      for (const auto& ch : cp.channels) {
        for (std::size_t k = 0; k < ch.band.q50.size(); ++k) {
          if (!(ch.band.q05[k] <= ch.band.q50[k] && ch.band.q50[k] <= ch.band.q95[k])) {
            o.check(false, "quantiles out of order in " + ch.channel.name);
          }
        }
      }
    }
  }
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("thrust variance epistemic -> total: ") + vs;
  return o;
}

Outcome metrics_fixtures() {
  Outcome o;
  auto ds = scalar_dataset({3.0});
  datasets::Observation second = ds.observations[0];
  second.condition.discharge_voltage = 400.0;
  second.values = {4.0};
  ds.observations.push_back(second);
  const inference::Predictor zero = [](const datasets::Observation&) { return std::vector<double>{0.0}; };
  const inference::Predictor partial = [](const datasets::Observation& obs) {
    return std::vector<double>{obs.values[0] == 3.0 ? 3.0 : 0.0};
  };
  const std::map<datasets::QoI, double> xi{{datasets::QoI::I_D, 0.025}};
  const std::vector<inference::Predictor> zeros{zero};
  const std::vector<inference::Predictor> partials{partial};
  const auto m1 = uq::error_metrics(ds, zeros, zero, xi);
  const auto m2 = uq::error_metrics(ds, partials, partial, xi);
  o.check(m1.size() == 1 && m1[0].mu == 1.0 && m1[0].mu50 == 1.0, "E_q = 1 fixture");
  o.check(m2.size() == 1 && m2[0].mu == 4.0 / 5.0 && m2[0].mu50 == 4.0 / 5.0, "E_q = 4/5 fixture");
  o.check(m2.size() == 1 && m2[0].sigma == 0.0 && m2[0].mu50_over_xi == 0.8 / 0.025, "derived columns");

  std::ostringstream table;
  uq::write_metrics_header(table);
  uq::write_metrics_rows(table, "Posterior", m2);
  std::istringstream in(table.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::istringstream hs(header);
  std::vector<std::string> cols;
  for (std::string c; hs >> c;) cols.push_back(c);
  o.check(cols == std::vector<std::string>{"QoI", "Case", "mu_50", "mu", "sigma", "mu_50/xi"}, "header " + header);
  std::istringstream rs(row);
  std::string q, label;
  double mu50 = 0, mu = 0, sigma = 0, ratio = 0;
  rs >> q >> label >> mu50 >> mu >> sigma >> ratio;
  o.check(q == "I_D" && label == "Posterior" && mu50 == 0.8 && mu == 0.8 && sigma == 0.0 && ratio == 32.0,
          "row " + row);
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "cathode closed form", 1.0, cathode_closed_form},
      {2, "anomalous transport", 1.0, anomalous_transport},
      {3, "plume conservation", 10.0, plume_conservation},
      {4, "thruster solver bounds", 10.0, solver_bounds},
      {5, "pressure-shift behavior", 60.0, pressure_shift_behavior},
      {6, "DRAM statistical correctness", 120.0, dram_correctness},
      {7, "likelihood arithmetic", 1.0, likelihood_arithmetic},
      {8, "synthetic end-to-end recovery", 8.0 * 3600.0, synthetic_recovery},
      {9, "UQ mechanics", 60.0, uq_mechanics},
      {10, "metrics fixtures", 1.0, metrics_fixtures},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > c.limit_seconds) o.check(false, "over the " + num(c.limit_seconds) + " s budget");
    failures += !o.pass;
    std::printf("criterion %2d %-32s %s  %8.2f s  %s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
