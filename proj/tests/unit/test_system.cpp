#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fixtures.hpp"
#include "hallcal/cathode.hpp"
#include "hallcal/errors.hpp"
#include "hallcal/parallel.hpp"
#include "hallcal/system.hpp"

namespace hallcal::system {
namespace {

using testing::fast_system;
using testing::reference_condition;
using testing::reference_theta;

OutputRequest with_sweep() {
  OutputRequest r;
  JionSweep s;
  s.radius = 1.0;
  for (int k = 0; k <= 18; ++k) s.angles.push_back(k * 5.0 * constants::pi / 180.0);
  r.j_ion.push_back(s);
  return r;
}

TEST(System, CathodeOnlyRunsNoThruster) {
  const SystemModel model(fast_system());
  const auto out = model.evaluate(reference_theta(), reference_condition(), OutputRequest::cathode());
  EXPECT_FALSE(out.thruster_evaluated);
  EXPECT_EQ(model.thruster_runs(), 0);
  EXPECT_DOUBLE_EQ(out.V_cc, cathode::coupling_voltage(cathode::CathodeParams::from(reference_theta()),
                                                       reference_condition().background_pressure));
}

TEST(System, CoupledInvariants) {
  const SystemModel model(fast_system());
  const auto out = model.evaluate(reference_theta(), reference_condition(), with_sweep());
  EXPECT_TRUE(out.thruster_evaluated);
  EXPECT_LE(out.thrust_corrected, out.thrust_uncorrected);
  EXPECT_NEAR(out.thrust_corrected / out.thrust_uncorrected, std::cos(out.divergence_angle), 1e-14);
  EXPECT_GE(out.discharge_current, 0.0);
  EXPECT_GE(out.beam_current, 0.0);
  ASSERT_EQ(out.j_ion.size(), 1u);
  for (double j : out.j_ion[0].values) EXPECT_GT(j, 0.0);
  EXPECT_EQ(out.u_ion.size(), out.z.size());
}

TEST(System, BitIdenticalOnRepeat) {
  const SystemModel a(fast_system());
  const SystemModel b(fast_system());
  const auto x = a.evaluate(reference_theta(), reference_condition(), with_sweep());
  const auto y = b.evaluate(reference_theta(), reference_condition(), with_sweep());
  EXPECT_EQ(x.thrust_corrected, y.thrust_corrected);
  EXPECT_EQ(x.u_ion, y.u_ion);
  EXPECT_EQ(x.j_ion[0].values, y.j_ion[0].values);
}

TEST(System, CacheIsExactMatchOnly) {
  const SystemModel model(fast_system(), 16);
  const auto a = model.try_evaluate(reference_theta(), reference_condition());
  const auto b = model.try_evaluate(reference_theta(), reference_condition());
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(model.cache_hits(), 1);
  auto theta = reference_theta();
  theta[Param::u_n] = std::nextafter(theta[Param::u_n], 1e9);
  model.try_evaluate(theta, reference_condition());
  EXPECT_EQ(model.cache_hits(), 1);
  EXPECT_EQ(model.thruster_runs(), 2);
}

TEST(System, FailuresAreReported) {
  auto cfg = fast_system();
  cfg.thruster.settings.wall_clock_limit = 1e-7;
  const SystemModel model(cfg);
  const auto r = model.try_evaluate(reference_theta(), reference_condition());
  EXPECT_FALSE(r->ok());
  EXPECT_FALSE(r->failure.empty());
  EXPECT_EQ(model.failures(), 1);
  EXPECT_THROW(model.evaluate(reference_theta(), reference_condition()), SolverTimeout);
}

TEST(System, ParallelEvaluationIsOrderIndependent) {
  const SystemModel model(fast_system());
  std::vector<double> P{5.0, 15.0, 25.0, 35.0};
  std::vector<double> serial(P.size());
  std::vector<double> parallel(P.size());
  for (std::size_t i = 0; i < P.size(); ++i) {
    serial[i] = model.evaluate(reference_theta(), reference_condition(P[i])).discharge_current;
  }
  parallel_for(P.size(), 4, [&](std::size_t i) {
    parallel[i] = model.evaluate(reference_theta(), reference_condition(P[i])).discharge_current;
  });
  EXPECT_EQ(serial, parallel);
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(8, 3, [](std::size_t i) {
                 if (i == 5) throw DomainError("boom");
               }),
               DomainError);
  EXPECT_GE(resolve_workers(0), 1);
  EXPECT_EQ(resolve_workers(3), 3);
}

}  // namespace
}  // namespace hallcal::system
