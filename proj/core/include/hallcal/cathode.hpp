#pragma once

#include "hallcal/params.hpp"

namespace hallcal::cathode {

struct CathodeParams {
  double V_vac = 0.0;   // V
  double T_ec = 0.0;    // eV
  double P_T = 0.0;     // Pa
  double P_star = 0.0;  // Pa

  static CathodeParams from(const ParameterSet& theta) {
    return {theta[Param::V_vac], theta[Param::T_ec], theta[Param::P_T], theta[Param::P_star]};
  }
};

/// Cathode coupling voltage at background pressure `P_B` (Pa):
///
///   V_cc = V_vac + T_ec ln(1 + P_B/P_T) - T_ec P_B / (P_T + P*)
///
/// Rises from V_vac at vacuum to a single maximum at P_B = P* and then
/// decreases. Throws DomainError for P_T <= 0, P_T + P* <= 0 or P_B < 0.
double coupling_voltage(const CathodeParams& p, double P_B);

/// dV_cc/dP_B.
double coupling_voltage_slope(const CathodeParams& p, double P_B);

}  // namespace hallcal::cathode
