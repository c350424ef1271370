#pragma once

#include "hallcal/params.hpp"
#include "hallcal/system.hpp"
#include "hallcal/thruster.hpp"
#include "hallcal/units.hpp"

namespace hallcal::testing {

inline ParameterSet reference_theta() {
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

inline OperatingCondition reference_condition(double P_B_utorr = 5.0) {
  return {300.0, units::utorr_to_pa(P_B_utorr), 5e-6};
}

/// SPT-100-like channel, 100 cells over 1 ms.
inline thruster::ThrusterConfig reference_thruster() { return {}; }

/// 50 cells over 0.3 ms, for tests that need many evaluations.
inline thruster::ThrusterConfig fast_thruster() {
  thruster::ThrusterConfig cfg;
  cfg.settings.cells = 50;
  cfg.settings.duration = 3e-4;
  cfg.settings.averaging_window = 1.5e-4;
  return cfg;
}

inline system::SystemConfig fast_system() {
  system::SystemConfig cfg;
  cfg.thruster = fast_thruster();
  return cfg;
}

}  // namespace hallcal::testing
