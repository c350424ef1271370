#include "hallcal/units.hpp"

#include <array>
#include <string>

#include "hallcal/errors.hpp"

namespace hallcal::units {
namespace {

struct UnitEntry {
  std::string_view tag;
  std::string_view dimension;
  double factor;
};

constexpr double kDeg = constants::pi / 180.0;

constexpr std::array<UnitEntry, 29> kUnits{{
    {"Pa", "pressure", 1.0},
    {"Torr", "pressure", torr},
    {"mTorr", "pressure", mtorr},
    {"uTorr", "pressure", utorr},
    {"kg/s", "mass_flow", 1.0},
    {"mg/s", "mass_flow", 1e-6},
    {"sccm_xe", "mass_flow", 9.8e-8},  // ~0.098 mg/s per sccm of xenon
    {"V", "voltage", 1.0},
    {"kV", "voltage", 1e3},
    {"eV", "temperature", 1.0},
    {"K", "kelvin", 1.0},
    {"m", "length", 1.0},
    {"cm", "length", 1e-2},
    {"mm", "length", 1e-3},
    {"rad", "angle", 1.0},
    {"deg", "angle", kDeg},
    {"A", "current", 1.0},
    {"mA", "current", 1e-3},
    {"N", "force", 1.0},
    {"mN", "force", 1e-3},
    {"m/s", "velocity", 1.0},
    {"km/s", "velocity", 1e3},
    {"A/m2", "current_density", 1.0},
    {"mA/cm2", "current_density", 10.0},
    {"uA/cm2", "current_density", 1e-2},
    {"T", "magnetic_field", 1.0},
    {"G", "magnetic_field", 1e-4},
    {"m^-3", "number_density", 1.0},
    {"1", "dimensionless", 1.0},
}};

const UnitEntry& find(std::string_view unit) {
  for (const auto& e : kUnits) {
    if (e.tag == unit) return e;
  }
  throw ConfigError("unknown unit tag '" + std::string(unit) + "'");
}

}  // namespace

double to_si_factor(std::string_view unit) { return find(unit).factor; }

std::string_view dimension_of(std::string_view unit) { return find(unit).dimension; }

}  // namespace hallcal::units
