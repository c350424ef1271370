#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "fixtures.hpp"
#include "hallcal/cathode.hpp"
#include "hallcal/errors.hpp"

namespace hallcal::cathode {
namespace {

using Big = boost::multiprecision::cpp_dec_float_50;

TEST(Cathode, VacuumLimitIsExact) {
  const CathodeParams p{31.75, 2.92, 6.5e-3, 8.6e-3};
  EXPECT_EQ(coupling_voltage(p, 0.0), 31.75);
}

TEST(Cathode, ReferenceValueMatchesHighPrecision) {
  const auto p = CathodeParams::from(testing::reference_theta());
  const double P_B = p.P_T;
  const Big T = p.T_ec;
  const Big expected = Big(p.V_vac) + T * log(Big(2)) - T * Big(p.P_T) / (Big(p.P_T) + Big(p.P_star));
  EXPECT_NEAR(coupling_voltage(p, P_B), expected.convert_to<double>(), 1e-12 * 40.0);
  // 2.92 * 48.72 / 113.57 in the same units
  EXPECT_NEAR(coupling_voltage(p, P_B), 31.75 + 2.92 * std::log(2.0) - 2.92 * 48.72 / 113.57, 1e-9);
}

TEST(Cathode, SlopeAtZero) {
  const CathodeParams p{20.0, 3.0, 5e-3, 1e-2};
  const double expected = 3.0 * (1.0 / 5e-3 - 1.0 / 1.5e-2);
  EXPECT_NEAR(coupling_voltage_slope(p, 0.0), expected, 1e-12 * expected);
  EXPECT_GT(expected, 0.0);
  const double h = 1e-9;
  EXPECT_NEAR((coupling_voltage(p, h) - coupling_voltage(p, 0.0)) / h, expected, 1e-4 * expected);
}

TEST(Cathode, InteriorMaximumAtPStar) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const CathodeParams p{60.0 * u(rng), 1.0 + 5.0 * u(rng), units::utorr_to_pa(10.0 + 90.0 * u(rng)),
                          units::utorr_to_pa(10.0 + 190.0 * u(rng))};
    const Big T = p.T_ec, PT = p.P_T, Ps = p.P_star;
    const auto neg_v = [&](const Big& P) { return -(Big(p.V_vac) + T * log(1 + P / PT) - T * P / (PT + Ps)); };
    const auto r = boost::math::tools::brent_find_minima(neg_v, Big(0), Big(10.0 * p.P_star), 120);
    EXPECT_NEAR(r.first.convert_to<double>(), p.P_star, 1e-6 * p.P_star);
    EXPECT_NEAR(coupling_voltage(p, r.first.convert_to<double>()), -r.second.convert_to<double>(), 1e-12 * 70.0);
    EXPECT_NEAR(coupling_voltage_slope(p, p.P_star), 0.0, 1e-9 * p.T_ec / p.P_star);
  }
}

TEST(Cathode, RejectsBadInputs) {
  EXPECT_THROW(coupling_voltage({30.0, 2.0, 0.0, 1e-3}, 1e-3), DomainError);
  EXPECT_THROW(coupling_voltage({30.0, 2.0, 1e-3, -2e-3}, 1e-3), DomainError);
  EXPECT_THROW(coupling_voltage({30.0, 2.0, 1e-3, 1e-3}, -1.0), DomainError);
}

}  // namespace
}  // namespace hallcal::cathode
