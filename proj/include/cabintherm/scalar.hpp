#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/AutoDiff>

namespace cabintherm {

// Forward-mode derivative type used by the solvers. Storage is bounded so no
// heap traffic happens inside residual evaluations.
inline constexpr int kMaxUnknowns = 8;
using GradientVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxUnknowns, 1>;
using ADScalar = Eigen::AutoDiffScalar<GradientVector>;

inline double value_of(double x) { return x; }

template <typename Derivative>
double value_of(const Eigen::AutoDiffScalar<Derivative>& x) {
  return x.value();
}

inline ADScalar make_variable(double value, int index, int size) {
  return ADScalar(value, size, index);
}

}  // namespace cabintherm
