#include "cabintherm/cop_curve.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"

namespace cabintherm {

CopCurve::CopCurve(std::vector<Breakpoint> points, CopMode mode)
    : points_(std::move(points)), mode_(mode) {
  if (points_.empty()) throw ConfigError("COP curve needs at least one breakpoint");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.delta_t) || !std::isfinite(p.cop)) {
      throw ConfigError("COP curve breakpoint is not finite");
    }
    if (mode_ == CopMode::heating && p.cop < 1.0) {
      throw ConfigError(fmt::format("heating COP {} at dT={} is below 1", p.cop, p.delta_t));
    }
    if (mode_ == CopMode::cooling && p.cop <= 0.0) {
      throw ConfigError(fmt::format("cooling COP {} at dT={} is not positive", p.cop, p.delta_t));
    }
    if (i > 0 && !(p.delta_t > points_[i - 1].delta_t)) {
      throw ConfigError("COP curve breakpoints must be strictly increasing in dT");
    }
  }
}

CopCurve CopCurve::constant(double cop, CopMode mode) { return CopCurve({{0.0, cop}}, mode); }

// Placeholder shapes; not manufacturer data.
CopCurve CopCurve::default_heating() {
  return CopCurve({{10.0, 3.0}, {20.0, 2.5}, {30.0, 2.0}, {40.0, 1.6}}, CopMode::heating);
}

CopCurve CopCurve::default_cooling() {
  return CopCurve({{5.0, 3.0}, {10.0, 2.6}, {15.0, 2.2}, {20.0, 1.9}}, CopMode::cooling);
}

CopCurve CopCurve::scaled(double factor) const {
  std::vector<Breakpoint> pts = points_;
  for (auto& p : pts) p.cop *= factor;
  return CopCurve(std::move(pts), mode_);
}

bool CopCurve::is_constant() const {
  for (const auto& p : points_) {
    if (p.cop != points_.front().cop) return false;
  }
  return true;
}

}  // namespace cabintherm
