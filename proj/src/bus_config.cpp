#include "cabintherm/bus_config.hpp"

#include <cmath>
#include <string_view>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"

namespace cabintherm {
namespace {

void require_positive(std::string_view name, double v) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw ConfigError(fmt::format("{} must be positive (got {})", name, v));
  }
}

void require_fraction(std::string_view name, double v) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw ConfigError(fmt::format("{} must lie in [0, 1] (got {})", name, v));
  }
}

}  // namespace

void BusConfig::validate() const {
  require_positive("h_door", h_door);
  require_positive("w_door_tot", w_door_tot);
  require_positive("C_d", c_d);
  require_positive("rho_inf", rho_inf);
  require_positive("c_p_a", c_p_a);
  require_positive("g", g);
  if (!std::isfinite(door_scale) || door_scale < 0.0) {
    throw ConfigError("door_scale must be non-negative");
  }
  require_positive("A_roof", a_roof);
  require_positive("A_wall", a_wall);
  require_positive("A_body", a_body);
  require_positive("k_body", k_body);
  require_positive("h_in", h_in);
  require_positive("h_out", h_out);
  require_positive("h_rh", h_rh);
  require_positive("sigma", sigma);
  require_positive("T_rh_tgt", t_rh_tgt);
  require_fraction("alpha_paint", alpha_paint);
  require_fraction("tau_win", tau_win);
  require_fraction("zeta_roof", zeta_roof);
  require_fraction("zeta_win", zeta_win);
  require_fraction("zeta_cab", zeta_cab);
  if (!std::isfinite(q_met_per_pass) || q_met_per_pass < 0.0) {
    throw ConfigError("q_met_per_pass must be non-negative");
  }
  if (!std::isfinite(a_rh) || a_rh < 0.0) throw ConfigError("A_rh must be non-negative");
  if (a_body < a_wall) {
    throw ConfigError(fmt::format("A_body ({}) must be at least A_wall ({})", a_body, a_wall));
  }
  if (cop_heating.mode() != CopMode::heating) throw ConfigError("cop_heating must be a heating curve");
  if (cop_cooling.mode() != CopMode::cooling) throw ConfigError("cop_cooling must be a cooling curve");
}

}  // namespace cabintherm
