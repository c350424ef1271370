#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "hallcal/cathode.hpp"
#include "hallcal/datasets.hpp"
#include "hallcal/inference.hpp"
#include "hallcal/plume.hpp"
#include "hallcal/system.hpp"
#include "hallcal/thruster.hpp"
#include "hallcal/units.hpp"

namespace {

using namespace hallcal;

ParameterSet reference_theta() {
  ParameterSet th;
  th[Param::T_ec] = 2.92;
  th[Param::V_vac] = 31.75;
  th[Param::P_T] = units::utorr_to_pa(48.72);
  th[Param::P_star] = units::utorr_to_pa(64.85);
  th[Param::alpha_anom] = 0.06;
  th[Param::beta_anom] = 0.99;
  th[Param::z_anom] = 1.14;
  th[Param::L_anom] = 0.43;
  th[Param::dz_anom] = 0.33;
  th[Param::u_n] = 278.11;
  th[Param::c_w] = 0.67;
  th[Param::f_n] = 5.23;
  th[Param::c0] = 0.6;
  th[Param::c1] = 0.4;
  th[Param::c2] = 10.0;
  th[Param::c3] = 0.4;
  th[Param::c4] = 1e20;
  th[Param::c5] = 1e16;
  return th;
}

const OperatingCondition kCondition{300.0, units::utorr_to_pa(5.0), 5e-6};

void BM_CouplingVoltage(benchmark::State& state) {
  const auto p = cathode::CathodeParams::from(reference_theta());
  double P = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cathode::coupling_voltage(p, P));
    P += 1e-12;
  }
}
BENCHMARK(BM_CouplingVoltage);

void BM_DischargeSolve(benchmark::State& state) {
  thruster::ThrusterConfig cfg;
  cfg.settings.cells = static_cast<int>(state.range(0));
  const auto theta = reference_theta();
  const auto params = thruster::ThrusterParams::from(theta);
  const double V_cc = cathode::coupling_voltage(cathode::CathodeParams::from(theta), kCondition.background_pressure);
  for (auto _ : state) {
    auto out = thruster::solve_discharge(cfg, params, kCondition, V_cc);
    benchmark::DoNotOptimize(out.thrust_uncorrected);
  }
}
BENCHMARK(BM_DischargeSolve)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PlumeModel(benchmark::State& state) {
  const auto p = plume::PlumeParams::from(reference_theta());
  for (auto _ : state) {
    const plume::CurrentDensityModel m(p, 3.6, kCondition.background_pressure);
    benchmark::DoNotOptimize(plume::effective_divergence(m, 1.0));
  }
}
BENCHMARK(BM_PlumeModel)->Unit(benchmark::kMicrosecond);

void BM_CurrentDensitySweep(benchmark::State& state) {
  const plume::CurrentDensityModel m(plume::PlumeParams::from(reference_theta()), 3.6, kCondition.background_pressure);
  for (auto _ : state) {
    double s = 0.0;
    for (int k = 0; k <= 90; ++k) s += m(1.0, k * 0.0174532925199433);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_CurrentDensitySweep);

void BM_LogLikelihood(benchmark::State& state) {
  datasets::Dataset ds;
  ds.name = "bench";
  ds.thruster_id = "bench";
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i) {
    datasets::Observation obs;
    obs.qoi = datasets::QoI::u_ion;
    obs.condition = {300.0, 1e-4 * (1 + i), 5e-6};
    for (int k = 0; k < 20; ++k) {
      obs.coords.push_back(0.001 * k);
      obs.values.push_back(1000.0 * k + 1.0);
    }
    ds.observations.push_back(obs);
  }
  const std::vector<datasets::Dataset> data{ds};
  const inference::Predictor predict = [](const datasets::Observation& o) {
    std::vector<double> f(o.values);
    for (double& v : f) v *= 1.01;
    return f;
  };
  for (auto _ : state) benchmark::DoNotOptimize(inference::log_likelihood(data, predict, {}));
}
BENCHMARK(BM_LogLikelihood)->Arg(5)->Arg(50);

void BM_SystemEvaluateCached(benchmark::State& state) {
  system::SystemConfig cfg;
  cfg.thruster.settings.cells = 50;
  cfg.thruster.settings.duration = 3e-4;
  cfg.thruster.settings.averaging_window = 1.5e-4;
  const system::SystemModel model(cfg, 16);
  const auto theta = reference_theta();
  model.try_evaluate(theta, kCondition);
  for (auto _ : state) benchmark::DoNotOptimize(model.try_evaluate(theta, kCondition)->ok());
}
BENCHMARK(BM_SystemEvaluateCached);

void BM_DramGaussian(benchmark::State& state) {
  const auto target = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return -0.5 * s;
  };
  inference::DramConfig cfg;
  cfg.n_samples = 10000;
  cfg.seed = 1;
  for (auto _ : state) {
    auto chain = inference::dram_sample(target, std::vector<double>(static_cast<std::size_t>(state.range(0)), 0.0), cfg);
    benchmark::DoNotOptimize(chain.samples.back());
  }
}
BENCHMARK(BM_DramGaussian)->Arg(2)->Arg(18)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
