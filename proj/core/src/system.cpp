#include "hallcal/system.hpp"

#include <bit>
#include <cmath>

#include "hallcal/cathode.hpp"
#include "hallcal/errors.hpp"

namespace hallcal::system {
namespace {

std::vector<double> cache_key(const ParameterSet& theta, const OperatingCondition& cond, const OutputRequest& req) {
  std::vector<double> key(theta.values().begin(), theta.values().end());
  key.push_back(cond.discharge_voltage);
  key.push_back(cond.background_pressure);
  key.push_back(cond.anode_mass_flow);
  key.push_back(req.cathode_only ? 1.0 : 0.0);
  for (const auto& sweep : req.j_ion) {
    key.push_back(sweep.radius);
    key.push_back(static_cast<double>(sweep.angles.size()));
    key.insert(key.end(), sweep.angles.begin(), sweep.angles.end());
  }
  return key;
}

}  // namespace

void SystemConfig::validate() const {
  thruster.validate();
  if (!(divergence_radius > 0.0)) throw ConfigError("divergence reference radius must be positive");
  if (!(cex_cross_section >= 0.0)) throw ConfigError("charge-exchange cross section must be nonnegative");
}

SystemModel::SystemModel(SystemConfig config, std::size_t cache_capacity)
    : config_(std::move(config)), cache_capacity_(cache_capacity) {
  config_.validate();
}

SystemOutput SystemModel::evaluate(const ParameterSet& theta, const OperatingCondition& cond,
                                   const OutputRequest& request) const {
  cond.validate();
  SystemOutput out;
  out.V_cc = cathode::coupling_voltage(cathode::CathodeParams::from(theta), cond.background_pressure);
  if (request.cathode_only) return out;

  ++thruster_runs_;
  const auto th = thruster::solve_discharge(config_.thruster, thruster::ThrusterParams::from(theta), cond, out.V_cc);
  out.thruster_evaluated = true;
  out.thrust_uncorrected = th.thrust_uncorrected;
  out.discharge_current = th.discharge_current;
  out.beam_current = th.ion_beam_current;
  out.z = th.z;
  out.u_ion = th.u_ion;
  out.profile = th.averaged;
  if (!(out.beam_current >= 0.0) || !(out.discharge_current >= 0.0)) {
    throw DomainError("thruster produced a negative current (I_D = " + std::to_string(out.discharge_current) +
                      " A, I_B = " + std::to_string(out.beam_current) + " A)");
  }

  const plume::CurrentDensityModel model(plume::PlumeParams::from(theta, config_.cex_cross_section), out.beam_current,
                                         cond.background_pressure);
  const double r_ref = config_.divergence_radius;
  out.divergence_angle = plume::effective_divergence(model, r_ref);
  out.thrust_corrected = plume::corrected_thrust(out.thrust_uncorrected, out.divergence_angle);
  for (const auto& sweep : request.j_ion) {
    JionProfile p{sweep.radius, sweep.angles, {}};
    p.values.reserve(sweep.angles.size());
    for (double phi : sweep.angles) p.values.push_back(model(sweep.radius, phi));
    out.j_ion.push_back(std::move(p));
  }
  return out;
}

std::shared_ptr<const Evaluation> SystemModel::try_evaluate(const ParameterSet& theta, const OperatingCondition& cond,
                                                            const OutputRequest& request) const {
  std::vector<double> key;
  if (cache_capacity_ > 0) {
    key = cache_key(theta, cond, request);
    std::lock_guard lock(cache_mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) {
      ++cache_hits_;
      return it->second;
    }
  }
  auto result = std::make_shared<Evaluation>();
  try {
    result->output = evaluate(theta, cond, request);
  } catch (const SolverDivergence& e) {
    result->failure = e.what();
  } catch (const SolverTimeout& e) {
    result->failure = e.what();
  } catch (const DomainError& e) {
    result->failure = e.what();
  }
  if (!result->ok()) ++failures_;
  if (cache_capacity_ > 0) {
    std::lock_guard lock(cache_mutex_);
    if (cache_.size() >= cache_capacity_) cache_.clear();
    cache_.emplace(std::move(key), result);
  }
  return result;
}

std::size_t SystemModel::KeyHash::operator()(const std::vector<double>& key) const {
  std::size_t h = 1469598103934665603ull;
  for (double v : key) {
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace hallcal::system
