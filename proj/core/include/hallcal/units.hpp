#pragma once

#include <string_view>

namespace hallcal {

namespace constants {
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double electron_mass = 9.1093837015e-31;     // kg
inline constexpr double boltzmann = 1.380649e-23;             // J/K
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

namespace units {
inline constexpr double torr = 101325.0 / 760.0;  // Pa
inline constexpr double mtorr = torr * 1e-3;
inline constexpr double utorr = torr * 1e-6;

constexpr double torr_to_pa(double p) { return p * torr; }
constexpr double pa_to_torr(double p) { return p / torr; }
constexpr double utorr_to_pa(double p) { return p * utorr; }

/// Multiplicative factor converting a value tagged with `unit` into SI.
/// Throws ConfigError for unknown tags. Accepted tags are grouped by
/// dimension; see `dimension_of`.
double to_si_factor(std::string_view unit);

/// Dimension label for a unit tag ("pressure", "mass_flow", "length", ...).
std::string_view dimension_of(std::string_view unit);

}  // namespace units
}  // namespace hallcal
