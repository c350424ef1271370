#include <gtest/gtest.h>

#include "hallcal/errors.hpp"
#include "hallcal/units.hpp"

namespace hallcal {
namespace {

TEST(Units, PressureFactors) {
  EXPECT_DOUBLE_EQ(units::to_si_factor("Torr"), 101325.0 / 760.0);
  EXPECT_NEAR(units::to_si_factor("uTorr"), 1.33322e-4, 1e-9);
  EXPECT_DOUBLE_EQ(units::utorr_to_pa(1.0), units::torr * 1e-6);
  EXPECT_DOUBLE_EQ(units::pa_to_torr(units::torr_to_pa(3.5)), 3.5);
}

TEST(Units, Dimensions) {
  EXPECT_EQ(units::dimension_of("mg/s"), "mass_flow");
  EXPECT_EQ(units::dimension_of("mN"), "force");
  EXPECT_EQ(units::dimension_of("A/m2"), "current_density");
  EXPECT_DOUBLE_EQ(units::to_si_factor("mg/s"), 1e-6);
  EXPECT_DOUBLE_EQ(units::to_si_factor("deg"), constants::pi / 180.0);
}

TEST(Units, UnknownUnitThrows) {
  EXPECT_THROW(units::to_si_factor("furlong"), Error);
}

}  // namespace
}  // namespace hallcal
