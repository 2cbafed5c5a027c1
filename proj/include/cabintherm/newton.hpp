#pragma once

#include <functional>

#include <Eigen/Core>

namespace cabintherm {

// Fills the residual and its Jacobian at x.
using NewtonSystem = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& jac)>;

struct NewtonOptions {
  int max_iterations = 100;
  double backtrack = 0.5;
  double min_step = 1e-4;
};

struct NewtonResult {
  Eigen::VectorXd x;
  Eigen::VectorXd residual;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton iteration on a square system. Converged once
// |r_i| <= tolerance_i for every row. Steps are halved until the residual
// 2-norm (rows weighted by 1/tolerance) decreases or the step falls below
// min_step, in which case the shortest step is taken anyway.
NewtonResult solve_newton(const NewtonSystem& system, const Eigen::VectorXd& x0,
                          const Eigen::VectorXd& tolerance, const NewtonOptions& options = {});

}  // namespace cabintherm
