#include "cabintherm/newton.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace cabintherm {

NewtonResult solve_newton(const NewtonSystem& system, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& tolerance, const NewtonOptions& options) {
  const Eigen::Index n = x0.size();
  NewtonResult out;
  out.x = x0;
  Eigen::VectorXd r(n), r_trial(n);
  Eigen::MatrixXd jac(n, n), jac_trial(n, n);
  system(out.x, r, jac);

  auto merit = [&](const Eigen::VectorXd& v) {
    const double m = v.cwiseQuotient(tolerance).squaredNorm();
    return std::isfinite(m) ? m : HUGE_VAL;
  };
  auto converged = [&](const Eigen::VectorXd& v) {
    return v.allFinite() && (v.cwiseAbs().array() <= tolerance.array()).all();
  };

  double m0 = merit(r);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    if (converged(r)) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd dx = jac.partialPivLu().solve(-r);
    if (!dx.allFinite()) break;

    double alpha = 1.0;
    Eigen::VectorXd x_trial;
    double m1 = HUGE_VAL;
    for (;;) {
      x_trial = out.x + alpha * dx;
      system(x_trial, r_trial, jac_trial);
      m1 = merit(r_trial);
      if (m1 < m0 || alpha * options.backtrack < options.min_step) break;
      alpha *= options.backtrack;
    }
    if (!std::isfinite(m1)) break;
    out.x = x_trial;
    r.swap(r_trial);
    jac.swap(jac_trial);
    m0 = m1;
    out.iterations = iter + 1;
  }
  if (!out.converged && converged(r)) out.converged = true;
  out.residual = r;
  return out;
}

}  // namespace cabintherm
