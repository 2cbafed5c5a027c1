#include "cabintherm/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"
#include "cabintherm/units.hpp"

namespace cabintherm {

void validate(const Scenario& scn) {
  auto fail = [&](std::string_view what) {
    throw DataError(fmt::format("scenario '{}': {}", scn.id, what));
  };
  if (scn.month < 1 || scn.month > 12) fail("month must be in 1..12");
  if (!std::isfinite(scn.t_inf) || scn.t_inf <= 0.0) fail("ambient temperature must be positive (K)");
  if (!std::isfinite(scn.i_dni) || scn.i_dni < 0.0) fail("I_dni must be non-negative");
  if (!std::isfinite(scn.i_dhi) || scn.i_dhi < 0.0) fail("I_dhi must be non-negative");
  if (!std::isfinite(scn.beta) || scn.beta < -kPi / 2 - 1e-12 || scn.beta > kPi / 2 + 1e-12) {
    fail("solar altitude must lie in [-pi/2, pi/2]");
  }
  if (scn.n_pass < 0) fail("N_pass must be non-negative");
  if (!std::isfinite(scn.zeta_door) || scn.zeta_door < 0.0 || scn.zeta_door > 1.0) {
    fail("zeta_door must lie in [0, 1]");
  }
  if (!std::isfinite(scn.zeta_sh) || scn.zeta_sh < 0.0 || scn.zeta_sh > 1.0) {
    fail("zeta_sh must lie in [0, 1]");
  }
  if (scn.beta <= 0.0 && (scn.i_dni > 0.0 || scn.i_dhi > 0.0)) {
    fail("irradiance must be zero while the sun is below the horizon");
  }
}

double passenger_heat(int n_pass, const BusConfig& cfg) { return n_pass * cfg.q_met_per_pass; }

double irradiance_roof(double beta, double i_dni, double i_dhi) {
  return std::max(0.0, std::sin(beta) * i_dni + i_dhi);
}

double irradiance_wall_directional(double beta, double phi, double psi, double i_dni, double i_dhi) {
  return std::cos(beta) * std::max(std::cos(phi - psi), 0.0) * i_dni + 0.5 * i_dhi;
}

double irradiance_wall_mean(double beta, double i_dni, double i_dhi) {
  return std::cos(beta) / kPi * i_dni + 0.5 * i_dhi;
}

SolarGains solar_heat_flows(const Scenario& scn, const BusConfig& cfg) {
  SolarGains out;
  // night: no solar input whatever the irradiance fields say
  if (scn.beta <= 0.0) return out;
  const double sun = 1.0 - scn.zeta_sh;
  const double roof = irradiance_roof(scn.beta, scn.i_dni, scn.i_dhi);
  const double wall = irradiance_wall_mean(scn.beta, scn.i_dni, scn.i_dhi);
  out.q_sol_so = sun * (cfg.a_roof * roof * cfg.alpha_paint * (1.0 - cfg.zeta_roof) +
                        cfg.a_wall * wall * (1.0 - cfg.zeta_win) * cfg.alpha_paint);
  const double transmitted = sun * cfg.a_wall * wall * cfg.zeta_win * cfg.tau_win;
  out.q_sol_cab = transmitted * cfg.zeta_cab;
  out.q_sol_si = transmitted * (1.0 - cfg.zeta_cab);
  return out;
}

double hvac_power(double q_hvac, double t_cab, double t_inf, const BusConfig& cfg) {
  if (q_hvac > 0.0) return q_hvac / cfg.heating_cop(t_cab, t_inf);
  if (q_hvac < 0.0) return -q_hvac / cfg.cooling_cop(t_cab, t_inf);
  return 0.0;
}

Disturbances disturbances(const Scenario& scn, const BusConfig& cfg) {
  Disturbances d;
  d.t_inf = scn.t_inf;
  d.zeta_door = scn.zeta_door;
  d.q_pass = passenger_heat(scn.n_pass, cfg);
  d.solar = solar_heat_flows(scn, cfg);
  return d;
}

HeatFlows heat_flows(const ThermalState& x, const Scenario& scn, const BusConfig& cfg, bool rh_on) {
  HeatFlows f;
  const SolarGains sol = solar_heat_flows(scn, cfg);
  f.q_pass = passenger_heat(scn.n_pass, cfg);
  f.q_door = door_loss(x.t_cab, scn.t_inf, scn.zeta_door, cfg);
  f.q_sol_cab = sol.q_sol_cab;
  f.q_sol_si = sol.q_sol_si;
  f.q_sol_so = sol.q_sol_so;
  f.q_r_so = radiative_loss_outer(x.t_so, scn.t_inf, cfg);
  f.q_h_si = convection_cabin_to_shell(x.t_cab, x.t_si, cfg);
  f.q_h_so = convection_outer(x.t_so, scn.t_inf, cfg);
  f.q_k = conduction_shell(x.t_si, x.t_so, cfg);
  if (rh_on) {
    f.q_r_rh = radiative_rh_to_shell(x.t_rh, x.t_si, cfg);
    f.q_h_rh = convection_rh_to_cabin(x.t_rh, x.t_cab, cfg);
    f.p_rh = x.p_rh;
  }
  f.q_hvac = x.q_hvac;
  f.p_hvac = hvac_power(x.q_hvac, x.t_cab, scn.t_inf, cfg);
  f.p_tot = f.p_rh + f.p_hvac;
  return f;
}

namespace {

void check_finite(const HeatFlows& f) {
  const std::pair<const char*, double> named[] = {
      {"Q_pass", f.q_pass}, {"Q_door", f.q_door},   {"Q_sol_cab", f.q_sol_cab},
      {"Q_sol_si", f.q_sol_si}, {"Q_sol_so", f.q_sol_so}, {"Q_r_so", f.q_r_so},
      {"Q_r_rh", f.q_r_rh}, {"Q_h_rh", f.q_h_rh},   {"Q_h_si", f.q_h_si},
      {"Q_h_so", f.q_h_so}, {"Q_k", f.q_k},         {"Q_hvac", f.q_hvac},
      {"P_rh", f.p_rh},     {"P_hvac", f.p_hvac},
  };
  for (const auto& [name, v] : named) {
    if (!std::isfinite(v)) throw EvaluationError(fmt::format("non-finite heat flow {}", name));
  }
}

}  // namespace

std::vector<double> balance_residuals(const ThermalState& state, const Scenario& scn,
                                      const BusConfig& cfg, bool rh_on) {
  check_finite(heat_flows(state, scn, cfg, rh_on));
  const auto rows = balance_rows(state, disturbances(scn, cfg), cfg, rh_on);
  if (rh_on) return {rows[0], rows[1], rows[2], rows[3]};
  return {rows[0], rows[2], rows[3]};
}

double largest_flow(const HeatFlows& f) {
  const double all[] = {f.q_pass, f.q_door,  f.q_sol_cab, f.q_sol_si, f.q_sol_so,
                        f.q_r_so, f.q_r_rh,  f.q_h_rh,    f.q_h_si,   f.q_h_so,
                        f.q_k,    f.q_hvac,  f.p_rh};
  double m = 0.0;
  for (double v : all) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace cabintherm
