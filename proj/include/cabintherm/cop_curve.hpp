#pragma once

#include <vector>

#include "cabintherm/scalar.hpp"

namespace cabintherm {

enum class CopMode { heating, cooling };

// Coefficient of performance as a function of a temperature difference (K).
// Piecewise-linear between breakpoints, flat outside them.
//
// Heating curves are keyed by T_cab - T_inf, cooling curves by the lift
// T_inf - T_cab; BusConfig takes care of the orientation.
class CopCurve {
 public:
  struct Breakpoint {
    double delta_t;
    double cop;
  };

  CopCurve(std::vector<Breakpoint> points, CopMode mode);

  static CopCurve constant(double cop, CopMode mode);
  static CopCurve default_heating();
  static CopCurve default_cooling();

  double operator()(double delta_t) const { return evaluate(delta_t); }

  template <typename Scalar>
  Scalar evaluate(const Scalar& delta_t) const {
    const double v = value_of(delta_t);
    if (v <= points_.front().delta_t) return Scalar(points_.front().cop);
    if (v >= points_.back().delta_t) return Scalar(points_.back().cop);
    std::size_t i = 1;
    while (points_[i].delta_t < v) ++i;
    const Breakpoint& lo = points_[i - 1];
    const Breakpoint& hi = points_[i];
    const double slope = (hi.cop - lo.cop) / (hi.delta_t - lo.delta_t);
    return Scalar(lo.cop) + slope * (delta_t - lo.delta_t);
  }

  // Multiplies every breakpoint COP by `factor`. The result is re-validated.
  CopCurve scaled(double factor) const;

  const std::vector<Breakpoint>& breakpoints() const { return points_; }
  CopMode mode() const { return mode_; }
  bool is_constant() const;

 private:
  std::vector<Breakpoint> points_;
  CopMode mode_;
};

}  // namespace cabintherm
