#include "cabintherm/interior_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace cabintherm {
namespace {

using Eigen::VectorXd;
using Vec = NlpVector;
using Mat = NlpMatrix;

double norm_inf(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
double norm_1(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().sum(); }

double fraction_to_boundary(const Vec& v, const Vec& dv, double tau) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) alpha = std::min(alpha, -tau * v[i] / dv[i]);
  }
  return alpha;
}

Vec lagrangian_gradient(const NlpEvaluation& ev, const Vec& y, const Vec& z) {
  Vec r = ev.grad_f;
  if (y.size() > 0) r.noalias() -= ev.jac_c.transpose() * y;
  if (z.size() > 0) r.noalias() -= ev.jac_g.transpose() * z;
  return r;
}

double barrier_merit(const NlpEvaluation& ev, const Vec& s, double mu, double nu) {
  double phi = ev.f;
  for (Eigen::Index i = 0; i < s.size(); ++i) phi -= mu * std::log(s[i]);
  return phi + nu * (norm_1(ev.c) + norm_1(ev.g - s));
}

// Powell-damped BFGS update keeping b positive definite.
void damped_bfgs(Mat& b, const Vec& step, const Vec& dgrad) {
  const double snorm = step.norm();
  if (snorm < 1e-14) return;
  const Vec bs = b * step;
  const double sbs = step.dot(bs);
  if (!(sbs > 0.0)) return;
  const double sy = step.dot(dgrad);
  double theta = 1.0;
  if (sy < 0.2 * sbs) theta = 0.8 * sbs / (sbs - sy);
  const Vec r = theta * dgrad + (1.0 - theta) * bs;
  const double sr = step.dot(r);
  if (!(sr > 1e-300)) return;
  b.noalias() -= bs * bs.transpose() / sbs;
  b.noalias() += r * r.transpose() / sr;
}

}  // namespace

namespace {

InteriorPointResult run(const NonlinearProgram& nlp, const VectorXd& x0, const InteriorPointOptions& options,
                        const InteriorPointResult* warm) {
  const int n = nlp.num_variables();
  const int me = nlp.num_equalities();
  const int mi = nlp.num_inequalities();
  if (n > kMaxNlpSize || mi > kMaxNlpSize || n + me > kMaxNlpSize) {
    throw std::invalid_argument("nonlinear program too large for the interior-point solver");
  }
  const double mu_min = options.tolerance / 10.0;

  InteriorPointResult out;
  VectorXd x = x0;
  NlpEvaluation ev;
  nlp.evaluate(x, ev);

  double mu = options.mu_initial;
  Vec s = ev.g.cwiseMax(1e-2);
  Vec z = Vec::Constant(mi, 1.0);
  for (int i = 0; i < mi; ++i) z[i] = std::max(mu / s[i], 1e-2);
  Vec y = Vec::Zero(me);
  Mat b = Mat::Identity(n, n);
  if (warm && warm->y.size() == me && warm->z.size() == mi && warm->hessian.rows() == n) {
    y = warm->y;
    b = warm->hessian;
    for (int i = 0; i < mi; ++i) {
      s[i] = std::max(ev.g[i], mu);
      z[i] = std::max(warm->z[i], mu / s[i]);
    }
  }
  double nu = 1.0;

  Mat kkt(n + me, n + me);
  Vec rhs(n + me);
  NlpEvaluation trial, ev_old;
  VectorXd xt(n), x_old(n);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    out.iterations = iter;
    const Vec rd = lagrangian_gradient(ev, y, z);
    const Vec rg = ev.g - s;
    const Vec sz = s.cwiseProduct(z);

    const double mult = (y.lpNorm<1>() + z.lpNorm<1>()) / std::max(1, me + mi);
    const double scale_d = std::max(100.0, mult) / 100.0;
    const double scale_c = std::max(100.0, mi > 0 ? z.lpNorm<1>() / mi : 0.0) / 100.0;
    auto kkt_error = [&](double m) {
      double e = std::max({norm_inf(rd) / scale_d, norm_inf(ev.c), norm_inf(rg)});
      if (mi > 0) e = std::max(e, norm_inf((sz.array() - m).matrix()) / scale_c);
      return e;
    };

    out.kkt_error = kkt_error(0.0);
    if (out.kkt_error <= options.tolerance) {
      out.converged = true;
      break;
    }
    while (mu > mu_min && kkt_error(mu) <= 100.0 * mu) {
      mu = std::max(mu_min, std::min(0.2 * mu, std::pow(mu, 1.5)));
    }

    // reduced primal-dual system in (dx, -dy)
    const Vec sigma = z.cwiseQuotient(s);
    kkt.setZero();
    kkt.topLeftCorner(n, n) = b;
    if (mi > 0) kkt.topLeftCorner(n, n).noalias() += ev.jac_g.transpose() * sigma.asDiagonal() * ev.jac_g;
    if (me > 0) {
      kkt.topRightCorner(n, me) = ev.jac_c.transpose();
      kkt.bottomLeftCorner(me, n) = ev.jac_c;
    }
    rhs.head(n) = -rd;
    if (mi > 0) {
      const Vec inner =
          (mu / s.array() - z.array() - sigma.array() * rg.array()).matrix();
      rhs.head(n).noalias() += ev.jac_g.transpose() * inner;
    }
    if (me > 0) rhs.tail(me) = -ev.c;

    Vec sol = kkt.partialPivLu().solve(rhs);
    if (!sol.allFinite()) {
      // rank-deficient constraint Jacobian: regularize the multiplier block
      kkt.bottomRightCorner(me, me).diagonal().array() -= 1e-8;
      sol = kkt.fullPivLu().solve(rhs);
      if (!sol.allFinite()) break;
    }
    const Vec dx = sol.head(n);
    const Vec dy = -sol.tail(me);
    const Vec ds = ev.jac_g * dx + rg;
    const Vec dz = (mu / s.array() - z.array() - sigma.array() * ds.array()).matrix();

    const double tau = std::max(0.99, 1.0 - mu);
    const double alpha_p_max = fraction_to_boundary(s, ds, tau);
    const double alpha_d = fraction_to_boundary(z, dz, tau);

    // merit function and its directional derivative along the step
    const double viol = norm_1(ev.c) + norm_1(rg);
    double dbarrier = ev.grad_f.dot(dx);
    for (int i = 0; i < mi; ++i) dbarrier -= mu * ds[i] / s[i];
    if (viol > 1e-14) {
      const double curvature = 0.5 * dx.dot(b * dx);
      nu = std::max(nu, (dbarrier + std::max(curvature, 0.0)) / (0.5 * viol));
    }
    const double dmerit = dbarrier - nu * viol;
    const double phi0 = barrier_merit(ev, s, mu, nu);

    double alpha = alpha_p_max;
    bool accepted = false;
    for (int k = 0; k < 40; ++k) {
      xt = x + alpha * dx;
      const Vec st = s + alpha * ds;
      nlp.evaluate(xt, trial);
      const double phi = barrier_merit(trial, st, mu, nu);
      if (std::isfinite(phi) && phi <= phi0 + 1e-4 * alpha * std::min(dmerit, 0.0)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // the quasi-Newton model is off; restart it and take a short step
      b.setIdentity();
      alpha = std::min(alpha_p_max, 1e-3);
      xt = x + alpha * dx;
      nlp.evaluate(xt, trial);
      if (!std::isfinite(trial.f)) break;
    }

    x_old = x;
    ev_old = ev;
    x += alpha * dx;
    s += alpha * ds;
    y += alpha_d * dy;
    z += alpha_d * dz;
    for (int i = 0; i < mi; ++i) {
      s[i] = std::max(s[i], 1e-300);
      z[i] = std::clamp(z[i], mu / (1e10 * s[i]), 1e10 * mu / s[i]);
    }
    std::swap(ev, trial);

    if (accepted) {
      const Vec dgrad = lagrangian_gradient(ev, y, z) - lagrangian_gradient(ev_old, y, z);
      damped_bfgs(b, Vec(x - x_old), dgrad);
    }
  }

  out.x = x;
  out.y = y;
  out.z = z;
  out.s = s;
  out.hessian = b;
  return out;
}

}  // namespace

InteriorPointResult solve_interior_point(const NonlinearProgram& nlp, const VectorXd& x0,
                                         const InteriorPointOptions& options) {
  return run(nlp, x0, options, nullptr);
}

InteriorPointResult solve_interior_point(const NonlinearProgram& nlp, const VectorXd& x0,
                                         const InteriorPointOptions& options, const InteriorPointResult& warm) {
  return run(nlp, x0, options, &warm);
}

}  // namespace cabintherm
