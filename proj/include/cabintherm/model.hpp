#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "cabintherm/bus_config.hpp"
#include "cabintherm/scalar.hpp"

namespace cabintherm {

// One hour of operation.
struct Scenario {
  std::string id;
  int month = 1;           // 1..12
  double t_inf = 283.15;   // K
  double i_dni = 0.0;      // W/m^2, direct normal
  double i_dhi = 0.0;      // W/m^2, diffuse horizontal
  double beta = 0.0;       // rad, solar altitude
  int n_pass = 0;
  double zeta_door = 0.0;  // fraction of time doors are open
  double zeta_sh = 0.0;    // fraction of time in shade
};

// Throws DataError when a scenario violates its invariants.
void validate(const Scenario& scn);

// Four reservoir temperatures plus the two actuator inputs. Heating is
// positive in q_hvac.
template <typename Scalar>
struct BasicThermalState {
  Scalar t_cab;
  Scalar t_rh;
  Scalar t_si;
  Scalar t_so;
  Scalar q_hvac;
  Scalar p_rh;
};
using ThermalState = BasicThermalState<double>;

// Every arrow of the steady-state heat-flow picture, in W.
struct HeatFlows {
  double q_pass = 0.0;
  double q_door = 0.0;
  double q_sol_cab = 0.0;
  double q_sol_si = 0.0;
  double q_sol_so = 0.0;
  double q_r_so = 0.0;
  double q_r_rh = 0.0;
  double q_h_rh = 0.0;
  double q_h_si = 0.0;
  double q_h_so = 0.0;
  double q_k = 0.0;
  double q_hvac = 0.0;
  double p_rh = 0.0;
  double p_hvac = 0.0;
  double p_tot = 0.0;
};

struct SolarGains {
  double q_sol_so = 0.0;
  double q_sol_cab = 0.0;
  double q_sol_si = 0.0;
};

double passenger_heat(int n_pass, const BusConfig& cfg);

// Net heat leaving the cabin through open doors. Same sign as t_cab - t_inf.
template <typename Scalar>
Scalar door_loss(const Scalar& t_cab, double t_inf, double zeta_door, const BusConfig& cfg) {
  using std::abs;
  using std::sqrt;
  const Scalar dt = t_cab - t_inf;
  if (std::abs(value_of(dt)) < 1e-12) return Scalar(0.0) * dt;
  const double coef = cfg.rho_inf * cfg.c_p_a * cfg.c_d *
                      std::sqrt(cfg.g * cfg.h_door * cfg.h_door * cfg.h_door) / 3.0;
  const Scalar mag = sqrt(Scalar(abs(dt) / t_inf));
  return coef * mag * dt * (cfg.w_door_tot * zeta_door * cfg.door_scale);
}

double irradiance_roof(double beta, double i_dni, double i_dhi);
// phi: solar azimuth, psi: azimuth of the wall normal.
double irradiance_wall_directional(double beta, double phi, double psi, double i_dni, double i_dhi);
// Wall irradiance averaged over all driving directions.
double irradiance_wall_mean(double beta, double i_dni, double i_dhi);

SolarGains solar_heat_flows(const Scenario& scn, const BusConfig& cfg);

template <typename Scalar>
Scalar radiative_loss_outer(const Scalar& t_so, double t_inf, const BusConfig& cfg) {
  const Scalar t2 = t_so * t_so;
  return cfg.sigma * cfg.a_body * (t2 * t2 - t_inf * t_inf * t_inf * t_inf);
}

// Panels are coplanar on the ceiling, so all of their radiation reaches the
// inner shell.
template <typename Scalar>
Scalar radiative_rh_to_shell(const Scalar& t_rh, const Scalar& t_si, const BusConfig& cfg) {
  const Scalar a2 = t_rh * t_rh;
  const Scalar b2 = t_si * t_si;
  return cfg.sigma * cfg.a_rh * (a2 * a2 - b2 * b2);
}

// Convection/conduction chain (reconstructed linear forms).
template <typename Scalar>
Scalar convection_cabin_to_shell(const Scalar& t_cab, const Scalar& t_si, const BusConfig& cfg) {
  return cfg.h_in * (cfg.a_roof + cfg.a_wall) * (t_cab - t_si);
}

template <typename Scalar>
Scalar conduction_shell(const Scalar& t_si, const Scalar& t_so, const BusConfig& cfg) {
  return cfg.k_body * (t_si - t_so);
}

template <typename Scalar>
Scalar convection_outer(const Scalar& t_so, double t_inf, const BusConfig& cfg) {
  return cfg.h_out * cfg.a_body * (t_so - t_inf);
}

template <typename Scalar>
Scalar convection_rh_to_cabin(const Scalar& t_rh, const Scalar& t_cab, const BusConfig& cfg) {
  return cfg.h_rh * cfg.a_rh * (t_rh - t_cab);
}

// Electric power of the vapour-compression unit for a signed heat flow.
double hvac_power(double q_hvac, double t_cab, double t_inf, const BusConfig& cfg);

// Same, with heating and cooling split into two non-negative parts.
template <typename Scalar>
Scalar hvac_power_split(const Scalar& q_hp, const Scalar& q_ac, const Scalar& t_cab, double t_inf,
                        const BusConfig& cfg) {
  return q_hp / cfg.heating_cop(t_cab, t_inf) + q_ac / cfg.cooling_cop(t_cab, t_inf);
}

// Scenario-dependent terms that do not depend on the unknowns.
struct Disturbances {
  double t_inf = 0.0;
  double zeta_door = 0.0;
  double q_pass = 0.0;
  SolarGains solar;
};

Disturbances disturbances(const Scenario& scn, const BusConfig& cfg);

// Energy balance of the cabin air, RH panel, inner shell and outer shell, in
// that order. With rh_on false the panel row is meaningless and the panel
// flows are zero.
template <typename Scalar>
std::array<Scalar, 4> balance_rows(const BasicThermalState<Scalar>& x, const Disturbances& d,
                                   const BusConfig& cfg, bool rh_on) {
  const Scalar q_door = door_loss(x.t_cab, d.t_inf, d.zeta_door, cfg);
  const Scalar q_h_si = convection_cabin_to_shell(x.t_cab, x.t_si, cfg);
  const Scalar q_k = conduction_shell(x.t_si, x.t_so, cfg);
  const Scalar q_h_so = convection_outer(x.t_so, d.t_inf, cfg);
  const Scalar q_r_so = radiative_loss_outer(x.t_so, d.t_inf, cfg);
  Scalar q_h_rh = Scalar(0.0) * x.t_cab;
  Scalar q_r_rh = q_h_rh;
  Scalar p_rh = q_h_rh;
  if (rh_on) {
    q_h_rh = convection_rh_to_cabin(x.t_rh, x.t_cab, cfg);
    q_r_rh = radiative_rh_to_shell(x.t_rh, x.t_si, cfg);
    p_rh = x.p_rh;
  }
  return {
      d.q_pass + q_h_rh - q_h_si - q_door + d.solar.q_sol_cab + x.q_hvac,
      p_rh - q_r_rh - q_h_rh,
      q_r_rh + q_h_si + d.solar.q_sol_si - q_k,
      q_k - q_h_so - q_r_so + d.solar.q_sol_so,
  };
}

// All flows for a state; P_hvac uses the unsplit COP form.
HeatFlows heat_flows(const ThermalState& state, const Scenario& scn, const BusConfig& cfg,
                     bool rh_on);

// Residuals (W) of the balance rows: four with radiant heaters, three (cabin,
// inner shell, outer shell) without. Throws EvaluationError naming the first
// non-finite flow.
std::vector<double> balance_residuals(const ThermalState& state, const Scenario& scn,
                                      const BusConfig& cfg, bool rh_on);

// Largest absolute flow entering any balance row; the natural scale for
// judging residuals.
double largest_flow(const HeatFlows& flows);

}  // namespace cabintherm
