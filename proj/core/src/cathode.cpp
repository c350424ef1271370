#include "hallcal/cathode.hpp"

#include <cmath>

#include "hallcal/errors.hpp"

namespace hallcal::cathode {
namespace {

void check(const CathodeParams& p, double P_B) {
  if (!(p.P_T > 0.0)) throw DomainError("cathode base pressure P_T must be positive");
  if (!(p.P_T + p.P_star > 0.0)) throw DomainError("cathode P_T + P* must be positive");
  if (!(P_B >= 0.0)) throw DomainError("background pressure must be nonnegative");
}

}  // namespace

double coupling_voltage(const CathodeParams& p, double P_B) {
  check(p, P_B);
  return p.V_vac + p.T_ec * std::log1p(P_B / p.P_T) - p.T_ec * P_B / (p.P_T + p.P_star);
}

double coupling_voltage_slope(const CathodeParams& p, double P_B) {
  check(p, P_B);
  return p.T_ec / (p.P_T + P_B) - p.T_ec / (p.P_T + p.P_star);
}

}  // namespace hallcal::cathode
