#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "fixtures.hpp"
#include "hallcal/cathode.hpp"
#include "hallcal/errors.hpp"
#include "hallcal/inference.hpp"

namespace hallcal::inference {
namespace {

using datasets::Dataset;
using datasets::Observation;
using datasets::QoI;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Dataset scalar_dataset(QoI q, std::vector<double> values, double P0 = 1e-3) {
  Dataset ds;
  ds.name = "fixture";
  for (std::size_t i = 0; i < values.size(); ++i) {
    ds.observations.push_back({q, {300.0, P0 * static_cast<double>(i + 1), 5e-6}, {}, 0.0, {values[i]}, {}});
  }
  return ds;
}

Predictor constant(double f) {
  return [f](const Observation& o) { return std::vector<double>(o.values.size(), f); };
}

TEST(Likelihood, SingleObservationScoresMinusEight) {
  const std::vector<Dataset> data{scalar_dataset(QoI::I_D, {1.0})};
  EXPECT_NEAR(log_likelihood(data, constant(0.9), {}), -8.0, 1e-12);
}

TEST(Likelihood, PerfectFitIsZero) {
  const std::vector<Dataset> data{scalar_dataset(QoI::I_D, {4.0, 4.5, 5.0})};
  const Predictor exact = [](const Observation& o) { return o.values; };
  EXPECT_EQ(log_likelihood(data, exact, {}), 0.0);
}

TEST(Likelihood, JointRescalingInvariance) {
  const std::vector<Dataset> data{scalar_dataset(QoI::I_D, {4.0, 4.5, 5.0})};
  auto scaled = data;
  for (auto& o : scaled[0].observations) o.values[0] *= 10.0;
  const Predictor f = [](const Observation& o) { return std::vector<double>{o.condition.background_pressure * 3e3}; };
  const Predictor f10 = [&](const Observation& o) { return std::vector<double>{10.0 * f(o)[0]}; };
  const double a = log_likelihood(data, f, {});
  const double b = log_likelihood(scaled, f10, {});
  EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
}

TEST(Likelihood, AdditiveOverDatasets) {
  const auto a = scalar_dataset(QoI::I_D, {4.0, 4.5});
  auto b = scalar_dataset(QoI::T_c, {0.08, 0.085});
  b.name = "other";
  const std::vector<Dataset> both{a, b};
  const auto f = constant(4.2);
  EXPECT_NEAR(log_likelihood(both, f, {}),
              log_likelihood(std::vector<Dataset>{a}, f, {}) + log_likelihood(std::vector<Dataset>{b}, f, {}), 1e-12);
}

TEST(Likelihood, PerQoITarget) {
  const std::vector<Dataset> data{scalar_dataset(QoI::V_cc, {1.0})};
  LikelihoodConfig cfg;
  cfg.targets[QoI::V_cc] = 0.01;
  EXPECT_NEAR(log_likelihood(data, constant(0.9), cfg), -50.0, 1e-10);
  cfg.targets[QoI::V_cc] = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Likelihood, NonFinitePredictionIsMinusInfinity) {
  const std::vector<Dataset> data{scalar_dataset(QoI::I_D, {1.0})};
  EXPECT_EQ(log_likelihood(data, constant(std::nan("")), {}), kNegInf);
}

class CathodePosterior : public ::testing::Test {
 protected:
  CathodePosterior() : model(testing::fast_system()) {
    const auto theta = testing::reference_theta();
    Dataset ds;
    ds.name = "vcc";
    for (double P : {5.0, 25.0, 50.0, 100.0}) {
      const auto c = testing::reference_condition(P);
      ds.observations.push_back({QoI::V_cc, c, {}, 0.0,
                                 {cathode::coupling_voltage(cathode::CathodeParams::from(theta), c.background_pressure)}, {}});
    }
    data = {ds};
  }
  system::SystemModel model;
  std::vector<Dataset> data;
};

TEST_F(CathodePosterior, OutsideSupportShortCircuits) {
  const Posterior post(model, data, default_priors(), {});
  auto theta = testing::reference_theta();
  theta[Param::alpha_anom] = 2.0;
  EXPECT_EQ(post.log_posterior(theta), kNegInf);
  EXPECT_EQ(model.thruster_runs(), 0);
}

TEST_F(CathodePosterior, SumOfParts) {
  const Posterior post(model, data, default_priors(), {});
  const auto theta = testing::reference_theta();
  EXPECT_EQ(post.log_likelihood(theta), 0.0);
  auto other = theta;
  other[Param::V_vac] = 30.0;
  EXPECT_DOUBLE_EQ(post.log_posterior(other), post.log_prior(other) + post.log_likelihood(other));
  EXPECT_NEAR(post.log_posterior(theta) - post.log_posterior(other), post.log_likelihood(theta) - post.log_likelihood(other),
              1e-9);
  EXPECT_EQ(model.thruster_runs(), 0);
}

TEST_F(CathodePosterior, SamplingSpaceDensityIncludesJacobianTerms) {
  const Posterior post(model, data, default_priors(), {});
  const auto theta = testing::reference_theta();
  const auto x = to_sampling_space(theta, post.priors());
  EXPECT_NEAR(post.log_posterior_sampling(x), log_prior_density_sampling(x, post.priors()) + post.log_likelihood(theta),
              1e-12);
}

double gaussian_2d(std::span<const double> x) { return -0.5 * (x[0] * x[0] + x[1] * x[1]); }

TEST(Dram, StandardNormal2D) {
  DramConfig cfg;
  cfg.n_samples = 50000;
  cfg.seed = 20261015;
  const auto chain = dram_sample(gaussian_2d, {0.5, -0.5}, cfg);
  double m[2] = {0, 0};
  double c[3] = {0, 0, 0};
  const std::size_t b = chain.burn_in_end();
  const double n = static_cast<double>(chain.size() - b);
  for (std::size_t i = b; i < chain.size(); ++i) {
    m[0] += chain.samples[i][0] / n;
    m[1] += chain.samples[i][1] / n;
  }
  for (std::size_t i = b; i < chain.size(); ++i) {
    const double a = chain.samples[i][0] - m[0];
    const double d = chain.samples[i][1] - m[1];
    c[0] += a * a / n;
    c[1] += a * d / n;
    c[2] += d * d / n;
  }
  EXPECT_LT(std::abs(m[0]), 0.05);
  EXPECT_LT(std::abs(m[1]), 0.05);
  EXPECT_NEAR(c[0], 1.0, 0.1);
  EXPECT_NEAR(c[2], 1.0, 0.1);
  EXPECT_LT(std::abs(c[1]), 0.1);
}

TEST(Dram, FixedSeedIsDeterministic) {
  DramConfig cfg;
  cfg.n_samples = 2000;
  cfg.seed = 3;
  const auto a = dram_sample(gaussian_2d, {0.0, 0.0}, cfg);
  const auto b = dram_sample(gaussian_2d, {0.0, 0.0}, cfg);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.stage, b.stage);
}

TEST(Dram, DegenerateConfigurationIsRandomWalk) {
  DramConfig cfg;
  cfg.n_samples = 40000;
  cfg.adapt = false;
  cfg.dr_scale_factor = 1.0;
  cfg.initial_proposal_sd = {1.5, 1.5};
  cfg.seed = 9;
  const auto chain = dram_sample(gaussian_2d, {0.0, 0.0}, cfg);
  // With identical stage laws the stage-2 acceptance cannot exceed stage 1's.
  const double a1 = static_cast<double>(chain.stage1_accepts) / static_cast<double>(chain.stage1_proposals);
  const double a2 = static_cast<double>(chain.stage2_accepts) / static_cast<double>(chain.stage2_proposals);
  EXPECT_GT(a1, 0.2);
  EXPECT_LT(a2, a1);
  double var = 0.0;
  for (std::size_t i = chain.burn_in_end(); i < chain.size(); ++i) var += chain.samples[i][0] * chain.samples[i][0];
  EXPECT_NEAR(var / static_cast<double>(chain.size() - chain.burn_in_end()), 1.0, 0.1);

  cfg.delayed_rejection = false;
  const auto plain = dram_sample(gaussian_2d, {0.0, 0.0}, cfg);
  EXPECT_EQ(plain.stage2_proposals, 0);
}

TEST(Dram, StallIsCountedNotFatal) {
  DramConfig cfg;
  cfg.n_samples = 500;
  cfg.adaptation_interval = 100;
  const auto flat_spike = [](std::span<const double> x) { return x[0] == 0.0 ? 0.0 : kNegInf; };
  const auto chain = dram_sample(flat_spike, {0.0}, cfg);
  EXPECT_EQ(chain.stalled_windows, 5);
  EXPECT_EQ(chain.size(), 500u);
}

TEST(Dram, RejectsNonFiniteStart) {
  EXPECT_THROW(dram_sample([](std::span<const double>) { return kNegInf; }, {0.0}, {}), DomainError);
}

TEST(Dram, ConfigValidation) {
  DramConfig cfg;
  cfg.burn_in_fraction = 1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dr_scale_factor = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

Chain synthetic_chain(std::vector<double> column) {
  Chain c;
  c.dimension = 1;
  for (double v : column) {
    c.samples.push_back({v});
    c.log_density.push_back(0.0);
    c.stage.push_back(1);
  }
  c.burn_in_fraction = 0.5;
  return c;
}

TEST(Diagnostics, ConstantChain) {
  const auto d = chain_diagnostics(synthetic_chain(std::vector<double>(100, 3.0)));
  const auto& p = d.parameters[0];
  EXPECT_EQ(p.std, 0.0);
  EXPECT_EQ(p.min, 3.0);
  EXPECT_EQ(p.p05, 3.0);
  EXPECT_EQ(p.p50, 3.0);
  EXPECT_EQ(p.p95, 3.0);
  EXPECT_EQ(p.max, 3.0);
  EXPECT_EQ(d.retained, 50u);
}

TEST(Diagnostics, UniformQuantiles) {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> col(200000);
  for (auto& v : col) v = u(rng);
  const auto p = chain_diagnostics(synthetic_chain(col)).parameters[0];
  EXPECT_NEAR(p.p05, 0.05, 0.01 * 0.05);
  EXPECT_NEAR(p.p50, 0.5, 0.01 * 0.5);
  EXPECT_NEAR(p.p95, 0.95, 0.01 * 0.95);
  EXPECT_NEAR(p.std, std::sqrt(1.0 / 12.0), 0.01 * std::sqrt(1.0 / 12.0));
  EXPECT_GT(p.ess, 50000.0);
}

TEST(Diagnostics, EmptyRetainedSliceIsError) {
  auto c = synthetic_chain({1.0, 2.0});
  c.burn_in_fraction = 1.0;
  EXPECT_THROW(chain_diagnostics(c), DomainError);
}

TEST(Diagnostics, SummaryTableColumns) {
  Chain c;
  c.dimension = kNumParams;
  const auto theta = testing::reference_theta();
  for (int i = 0; i < 10; ++i) {
    c.samples.emplace_back(theta.values().begin(), theta.values().end());
    c.log_density.push_back(-1.0);
    c.stage.push_back(0);
  }
  std::ostringstream os;
  write_summary_table(os, parameter_diagnostics(c, default_priors()));
  const auto text = os.str();
  const auto header = text.substr(0, text.find('\n'));
  std::istringstream hs(header);
  std::vector<std::string> words;
  for (std::string w; hs >> w;) words.push_back(w);
  EXPECT_EQ(words, (std::vector<std::string>{"Variable", "Prior", "Min", "5th", "pctile", "50th", "pctile", "95th",
                                             "pctile", "Max", "Std", "dev"}));
  EXPECT_NE(text.find("P_T          U(10, 100)"), std::string::npos);
  EXPECT_NE(text.find("48.72"), std::string::npos);
  EXPECT_NE(text.find("c4           U(18, 22)"), std::string::npos);
}

TEST(ChainIO, RoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "hallcal_chain_roundtrip.tsv";
  const auto theta = testing::reference_theta();
  {
    std::ofstream out(path);
    write_chain_header(out, R"({"seed":4,"burn_in_fraction":0.25})");
    write_chain_row(out, theta.values(), -12.5, 1);
    write_chain_row(out, theta.values(), -12.5, 0);
    write_chain_row(out, theta.values(), kNegInf, 0);
    write_chain_row(out, theta.values(), -3.0, 2);
  }
  const auto file = read_chain(path);
  EXPECT_EQ(file.chain.dimension, kNumParams);
  EXPECT_EQ(file.chain.size(), 4u);
  EXPECT_EQ(file.chain.burn_in_fraction, 0.25);
  EXPECT_EQ(file.chain.samples[0], std::vector<double>(theta.values().begin(), theta.values().end()));
  EXPECT_EQ(file.chain.log_density[2], kNegInf);
  EXPECT_EQ(file.chain.stage, (std::vector<std::uint8_t>{1, 0, 0, 2}));
  EXPECT_EQ(retained_parameters(file.chain).size(), 3u);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace hallcal::inference
