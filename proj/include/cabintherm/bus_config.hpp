#pragma once

#include "cabintherm/cop_curve.hpp"
#include "cabintherm/units.hpp"

namespace cabintherm {

// Geometric, material and HVAC parameters of one vehicle/HVAC concept.
//
// The convection coefficients h_in, h_out, h_rh and the shell conductance
// k_body feed a reconstructed linear convection/conduction chain; they are
// defaults, not measured values. a_body defaults to roof + walls.
struct BusConfig {
  // doors
  double h_door = 1.95;      // m
  double w_door_tot = 4.4;   // m, combined width of all doors
  double c_d = 0.6;          // discharge coefficient
  double rho_inf = 1.25;     // kg/m^3
  double c_p_a = 1005.0;     // J/(kg K)
  double g = 9.81;           // m/s^2
  double door_scale = 1.0;   // multiplier on door losses (air curtains etc.)

  // shell
  double a_roof = 48.6;      // m^2
  double a_wall = 102.0;     // m^2
  double a_body = 150.6;     // m^2, outer radiating area
  double k_body = 450.0;     // W/K, inner-to-outer shell conductance
  double h_in = 7.0;         // W/(m^2 K)
  double h_out = 20.0;       // W/(m^2 K)

  // solar
  double alpha_paint = 0.3;
  double tau_win = 0.8;
  double zeta_roof = 0.7;
  double zeta_win = 0.35;
  double zeta_cab = 0.5;
  double sigma = 5.67e-8;    // W/(m^2 K^4)

  // occupants: 1.2 met * 58.15 W/(m^2 met) * 1.8 m^2
  double q_met_per_pass = 1.2 * 58.15 * 1.8;

  // radiant heater panels
  bool rh_enabled = false;
  double a_rh = 0.0;                    // m^2, total panel area
  double h_rh = 3.0;                    // W/(m^2 K)
  double t_rh_tgt = to_kelvin(90.0);    // K

  CopCurve cop_heating = CopCurve::default_heating();
  CopCurve cop_cooling = CopCurve::default_cooling();

  // Throws ConfigError on violated invariants.
  void validate() const;

  template <typename Scalar>
  Scalar heating_cop(const Scalar& t_cab, double t_inf) const {
    return cop_heating.evaluate(Scalar(t_cab - t_inf));
  }

  template <typename Scalar>
  Scalar cooling_cop(const Scalar& t_cab, double t_inf) const {
    return cop_cooling.evaluate(Scalar(t_inf - t_cab));
  }

  bool uses_radiant_heaters() const { return rh_enabled && a_rh > 0.0; }
};

}  // namespace cabintherm
