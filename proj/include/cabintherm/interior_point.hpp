#pragma once

#include <Eigen/Core>

namespace cabintherm {

// Programs are small: at most kMaxNlpSize variables, and variables plus
// equalities (the size of the reduced KKT system) also within that bound.
// Storage lives on the stack.
inline constexpr int kMaxNlpSize = 16;
using NlpVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxNlpSize, 1>;
using NlpMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxNlpSize, kMaxNlpSize>;

struct NlpEvaluation {
  double f = 0.0;
  NlpVector grad_f;
  NlpVector c;  // equalities, c(x) = 0
  NlpMatrix jac_c;
  NlpVector g;  // inequalities, g(x) >= 0
  NlpMatrix jac_g;
};

// Small dense nonlinear program: minimize f(x) s.t. c(x) = 0, g(x) >= 0.
class NonlinearProgram {
 public:
  virtual ~NonlinearProgram() = default;
  virtual int num_variables() const = 0;
  virtual int num_equalities() const = 0;
  virtual int num_inequalities() const = 0;
  virtual void evaluate(const Eigen::VectorXd& x, NlpEvaluation& out) const = 0;
};

struct InteriorPointOptions {
  double tolerance = 1e-10;  // on the unscaled KKT residual
  int max_iterations = 400;
  double mu_initial = 0.1;
};

struct InteriorPointResult {
  Eigen::VectorXd x;
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd z;  // inequality multipliers, >= 0
  Eigen::VectorXd s;  // inequality slacks
  Eigen::MatrixXd hessian;  // final quasi-Newton matrix
  int iterations = 0;
  bool converged = false;
  double kkt_error = 0.0;
};

// Primal-dual barrier method with slack variables, fraction-to-the-boundary
// rule, an l1 merit line search and a damped BFGS approximation of the
// Lagrangian Hessian. Starting points need not be feasible. Throws
// std::invalid_argument for programs beyond kMaxNlpSize.
InteriorPointResult solve_interior_point(const NonlinearProgram& nlp, const Eigen::VectorXd& x0,
                                         const InteriorPointOptions& options = {});

// Same, continuing from the multipliers, slacks and Hessian approximation of
// an earlier solve of a program with the same dimensions (typically with
// slightly moved constraints). Pair it with a small mu_initial.
InteriorPointResult solve_interior_point(const NonlinearProgram& nlp, const Eigen::VectorXd& x0,
                                         const InteriorPointOptions& options, const InteriorPointResult& warm);

}  // namespace cabintherm
