#include "cabintherm/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"
#include "cabintherm/interior_point.hpp"
#include "cabintherm/newton.hpp"
#include "cabintherm/scalar.hpp"

namespace cabintherm {

std::string_view to_string(HvacMode mode) {
  switch (mode) {
    case HvacMode::heating: return "heating";
    case HvacMode::cooling: return "cooling";
    case HvacMode::passive: return "passive";
  }
  return "?";
}

std::string_view to_string(SolverKind kind) {
  return kind == SolverKind::optimization ? "optimization" : "rootfind";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Both routes work in scaled unknowns: temperatures as (T - 273.15) / 10 and
// powers in kW, so every column of the Jacobian has a similar magnitude.
constexpr double kTRef = 273.15;
constexpr double kTUnit = 10.0;
constexpr double kPUnit = 1000.0;

constexpr double kSnapPower = 1e-6;     // W; smaller heating/cooling is reported as zero
constexpr double kPmvTolerance = 1e-9;  // exact mean PMV against its bound
// An active bound may sit this far inside the window; the interior point only
// resolves complementarity to about its KKT tolerance.
constexpr double kPmvSlack = 1e-8;

double to_tau(double t) { return (t - kTRef) / kTUnit; }
double from_tau(double tau) { return kTRef + kTUnit * tau; }

ADScalar variable(const VectorXd& x, int i, int n) { return ADScalar(x[i], n, i); }
ADScalar constant(double v, int n) { return ADScalar(v, GradientVector::Zero(n)); }

struct Context {
  Context(const Scenario& s, const ThermalModel& m, bool on)
      : scn(s), model(m), cfg(m.config()), rh_on(on) {
    validate(scn);
    if (rh_on && !cfg.uses_radiant_heaters()) {
      throw std::invalid_argument("radiant heaters requested but the configuration has none");
    }
    dist = disturbances(scn, cfg);
    occ = model.occupancy(scn);
    slice = model.surrogate().slice(occ.clo);
  }

  const Scenario& scn;
  const ThermalModel& model;
  const BusConfig& cfg;
  bool rh_on;
  Disturbances dist;
  Occupancy occ;
  PmvSurrogate::Slice slice;
};

double exact_mean(const Context& c, double t_cab, double t_si, double t_rh) {
  return occupancy_mean_pmv(c.occ, c.model.spec(), t_cab, t_si, t_rh, c.rh_on);
}

// Surrogate mean PMV and its partial derivatives in kelvin.
struct SurrogateMean {
  double value = 0.0;
  double d_cab = 0.0;
  double d_si = 0.0;
  double d_rh = 0.0;
};

SurrogateMean surrogate_mean(const Context& c, double t_cab, double t_si, double t_rh) {
  SurrogateMean out;
  if (!c.rh_on) {
    const auto g = c.slice.evaluate(t_cab, t_si);
    return {g.value, g.d_air, g.d_mr, 0.0};
  }
  const double si3 = t_si * t_si * t_si;
  const double rh3 = t_rh * t_rh * t_rh;
  for (std::size_t k = 0; k < c.occ.group_weight.size(); ++k) {
    const double w = c.occ.group_weight[k];
    const double n = c.occ.group_count[k];
    const double t_mr = mean_radiant_temperature(w, t_si, t_rh);
    const auto g = c.slice.evaluate(t_cab, t_mr);
    const double mr3 = t_mr * t_mr * t_mr;
    out.value += n * g.value;
    out.d_cab += n * g.d_air;
    out.d_si += n * g.d_mr * (1.0 - w) * si3 / mr3;
    out.d_rh += n * g.d_mr * w * rh3 / mr3;
  }
  const double inv = 1.0 / c.occ.size();
  out.value *= inv;
  out.d_cab *= inv;
  out.d_si *= inv;
  out.d_rh *= inv;
  return out;
}

SolveResult finish(const Context& c, ThermalState st, SolverKind kind, int iterations) {
  SolveResult res;
  res.scenario_id = c.scn.id;
  res.month = c.scn.month;
  if (!c.rh_on) {
    // no panels in this branch; report them at the ceiling temperature
    st.t_rh = st.t_si;
    st.p_rh = 0.0;
  }
  st.p_rh = std::max(st.p_rh, 0.0);
  res.state = st;
  res.flows = heat_flows(st, c.scn, c.cfg, c.rh_on);
  res.q_hp = std::max(st.q_hvac, 0.0);
  res.q_ac = std::max(-st.q_hvac, 0.0);
  if (!c.occ.empty()) {
    res.per_passenger_pmv = occupancy_pmv(c.occ, c.model.spec(), st.t_cab, st.t_si, st.t_rh, c.rh_on);
    res.mean_psi = clamp_pmv(mean_pmv(res.per_passenger_pmv));
    res.ppd = ppd(*res.mean_psi);
  }
  res.p_tot = res.flows.p_tot;
  if (st.q_hvac > 0.0 || st.p_rh > 0.0) {
    res.mode = st.q_hvac < 0.0 ? HvacMode::cooling : HvacMode::heating;
  } else if (st.q_hvac < 0.0) {
    res.mode = HvacMode::cooling;
  } else {
    res.mode = HvacMode::passive;
  }
  res.rh_used = c.rh_on;
  res.solver = kind;
  res.iterations = iterations;
  return res;
}

// ---------------------------------------------------------------------------
// root-finding route

struct RootLayout {
  bool rh_on = false;
  bool hvac = false;  // Q_hvac unknown and the PMV row present
  int i_cab = 0, i_rh = -1, i_si = 0, i_so = 0, i_q = -1, i_p = -1;
  int n = 0;
};

RootLayout root_layout(bool rh_on, bool hvac) {
  RootLayout l;
  l.rh_on = rh_on;
  l.hvac = hvac;
  int k = 0;
  l.i_cab = k++;
  if (rh_on) l.i_rh = k++;
  l.i_si = k++;
  l.i_so = k++;
  if (hvac) l.i_q = k++;
  if (rh_on) l.i_p = k++;
  l.n = k;
  return l;
}

ThermalState root_state(const Context& c, const RootLayout& l, const VectorXd& x) {
  ThermalState s{};
  s.t_cab = from_tau(x[l.i_cab]);
  s.t_si = from_tau(x[l.i_si]);
  s.t_so = from_tau(x[l.i_so]);
  s.t_rh = l.i_rh >= 0 ? from_tau(x[l.i_rh]) : s.t_si;
  s.q_hvac = l.i_q >= 0 ? kPUnit * x[l.i_q] : 0.0;
  s.p_rh = l.i_p >= 0 ? kPUnit * x[l.i_p] : 0.0;
  (void)c;
  return s;
}

void root_residual(const Context& c, const RootLayout& l, double psi_tgt, const VectorXd& x, VectorXd& r,
                   MatrixXd& jac) {
  const int n = l.n;
  auto temperature = [&](int i) -> ADScalar { return kTRef + kTUnit * variable(x, i, n); };
  auto power = [&](int i) -> ADScalar { return i >= 0 ? ADScalar(kPUnit * variable(x, i, n)) : constant(0.0, n); };

  BasicThermalState<ADScalar> s{temperature(l.i_cab),
                                l.i_rh >= 0 ? temperature(l.i_rh) : constant(c.cfg.t_rh_tgt, n),
                                temperature(l.i_si),
                                temperature(l.i_so),
                                power(l.i_q),
                                power(l.i_p)};
  const auto rows = balance_rows(s, c.dist, c.cfg, l.rh_on);

  jac.setZero();
  int row = 0;
  auto put = [&](const ADScalar& v) {
    r[row] = v.value() / kPUnit;
    if (v.derivatives().size() == n) jac.row(row) = v.derivatives().transpose() / kPUnit;
    ++row;
  };
  put(rows[0]);
  if (l.rh_on) put(rows[1]);
  put(rows[2]);
  put(rows[3]);
  if (l.rh_on) {
    r[row] = x[l.i_rh] - to_tau(c.cfg.t_rh_tgt);
    jac(row, l.i_rh) = 1.0;
    ++row;
  }
  if (l.hvac) {
    auto mean_at = [&](const VectorXd& v) {
      const ThermalState st = root_state(c, l, v);
      return exact_mean(c, st.t_cab, st.t_si, st.t_rh);
    };
    const double base = mean_at(x);
    r[row] = base - psi_tgt;
    constexpr double h = 1e-6;
    VectorXd xp = x;
    for (int i : {l.i_cab, l.i_si, l.i_rh}) {
      if (i < 0) continue;
      xp[i] = x[i] + h;
      jac(row, i) = (mean_at(xp) - base) / h;
      xp[i] = x[i];
    }
    ++row;
  }
}

// hvac = false: passive system with Q_hvac = 0 and no PMV row.
SolveResult solve_root(const Context& c, bool hvac, double psi_tgt) {
  const RootLayout l = root_layout(c.rh_on, hvac);
  VectorXd tol(l.n);
  {
    int row = 0;
    const int balance = c.rh_on ? 4 : 3;
    for (; row < balance; ++row) tol[row] = 1e-10;  // kW
    if (c.rh_on) tol[row++] = 1e-12;
    if (hvac) tol[row++] = 1e-10;
  }
  const NewtonSystem system = [&](const VectorXd& x, VectorXd& r, MatrixXd& jac) {
    root_residual(c, l, psi_tgt, x, r, jac);
  };

  const double t_inf = c.scn.t_inf;
  const double offsets[] = {0.0, 5.0, -5.0, 10.0, -10.0, 15.0};
  VectorXd last_residual;
  int total_iterations = 0;
  for (double dt : offsets) {
    VectorXd x0 = VectorXd::Zero(l.n);
    x0[l.i_cab] = to_tau(std::clamp(t_inf, 285.0, 299.0) + dt);
    x0[l.i_si] = to_tau(t_inf + dt);
    x0[l.i_so] = to_tau(t_inf + dt);
    if (l.i_rh >= 0) x0[l.i_rh] = to_tau(c.cfg.t_rh_tgt);
    try {
      const NewtonResult nr = solve_newton(system, x0, tol);
      total_iterations += nr.iterations;
      last_residual = nr.residual;
      if (nr.converged) return finish(c, root_state(c, l, nr.x), SolverKind::rootfind, total_iterations);
    } catch (const EvaluationError&) {
      // unphysical trial point; try the next start
    }
  }
  std::vector<double> residuals(last_residual.data(), last_residual.data() + last_residual.size());
  const int balance = c.rh_on ? 4 : 3;
  for (int i = 0; i < std::min<int>(balance, static_cast<int>(residuals.size())); ++i) residuals[i] *= kPUnit;
  throw SolverError(fmt::format("scenario '{}': Newton iteration did not converge from any starting point",
                                c.scn.id),
                    residuals);
}

// ---------------------------------------------------------------------------
// optimization route

struct PmvBounds {
  std::optional<double> lo;  // surrogate-space lower bound
  std::optional<double> hi;
  bool equality = false;     // lo == hi, imposed as an equality
};

class WindowProgram final : public NonlinearProgram {
 public:
  WindowProgram(const Context& c, const PmvBounds& b) : c_(c), b_(b) {
    int k = 0;
    i_cab_ = k++;
    if (c.rh_on) i_rh_ = k++;
    i_si_ = k++;
    i_so_ = k++;
    i_hp_ = k++;
    i_ac_ = k++;
    if (c.rh_on) i_p_ = k++;
    n_ = k;
    me_ = (c.rh_on ? 5 : 3) + (b.equality ? 1 : 0);
    mi_ = 2 + (c.rh_on ? 1 : 0) + (!b.equality && b.lo ? 1 : 0) + (!b.equality && b.hi ? 1 : 0);
  }

  int num_variables() const override { return n_; }
  int num_equalities() const override { return me_; }
  int num_inequalities() const override { return mi_; }

  ThermalState state(const VectorXd& x) const {
    ThermalState s{};
    s.t_cab = from_tau(x[i_cab_]);
    s.t_si = from_tau(x[i_si_]);
    s.t_so = from_tau(x[i_so_]);
    s.t_rh = i_rh_ >= 0 ? from_tau(x[i_rh_]) : s.t_si;
    s.q_hvac = kPUnit * (x[i_hp_] - x[i_ac_]);
    s.p_rh = i_p_ >= 0 ? kPUnit * x[i_p_] : 0.0;
    return s;
  }

  double heating(const VectorXd& x) const { return kPUnit * x[i_hp_]; }
  double cooling(const VectorXd& x) const { return kPUnit * x[i_ac_]; }

  VectorXd initial_point() const {
    const double t_inf = c_.scn.t_inf;
    VectorXd x = VectorXd::Zero(n_);
    x[i_cab_] = to_tau(std::clamp(t_inf, 285.0, 299.0));
    x[i_si_] = to_tau(t_inf);
    x[i_so_] = to_tau(t_inf);
    if (i_rh_ >= 0) x[i_rh_] = to_tau(c_.cfg.t_rh_tgt);
    x[i_hp_] = 0.01;
    x[i_ac_] = 0.01;
    if (i_p_ >= 0) x[i_p_] = 0.5;
    return x;
  }

  void evaluate(const VectorXd& x, NlpEvaluation& out) const override {
    const int n = n_;
    auto temperature = [&](int i) -> ADScalar { return kTRef + kTUnit * variable(x, i, n); };
    const ADScalar t_cab = temperature(i_cab_);
    const ADScalar q_hp = kPUnit * variable(x, i_hp_, n);
    const ADScalar q_ac = kPUnit * variable(x, i_ac_, n);
    BasicThermalState<ADScalar> s{t_cab,
                                  i_rh_ >= 0 ? temperature(i_rh_) : constant(c_.cfg.t_rh_tgt, n),
                                  temperature(i_si_),
                                  temperature(i_so_),
                                  q_hp - q_ac,
                                  i_p_ >= 0 ? ADScalar(kPUnit * variable(x, i_p_, n)) : constant(0.0, n)};

    const ADScalar p_hvac = hvac_power_split(q_hp, q_ac, t_cab, c_.scn.t_inf, c_.cfg);
    out.f = p_hvac.value() / kPUnit;
    out.grad_f = p_hvac.derivatives() / kPUnit;
    if (i_p_ >= 0) {
      out.f += x[i_p_];
      out.grad_f[i_p_] += 1.0;
    }

    out.c.resize(me_);
    out.jac_c.setZero(me_, n);
    const auto rows = balance_rows(s, c_.dist, c_.cfg, c_.rh_on);
    int row = 0;
    auto put = [&](const ADScalar& v) {
      out.c[row] = v.value() / kPUnit;
      if (v.derivatives().size() == n) out.jac_c.row(row) = v.derivatives().transpose() / kPUnit;
      ++row;
    };
    put(rows[0]);
    if (c_.rh_on) put(rows[1]);
    put(rows[2]);
    put(rows[3]);
    if (c_.rh_on) {
      out.c[row] = x[i_rh_] - to_tau(c_.cfg.t_rh_tgt);
      out.jac_c(row, i_rh_) = 1.0;
      ++row;
    }

    out.g.resize(mi_);
    out.jac_g.setZero(mi_, n);
    int ineq = 0;
    out.g[ineq] = x[i_hp_];
    out.jac_g(ineq++, i_hp_) = 1.0;
    out.g[ineq] = x[i_ac_];
    out.jac_g(ineq++, i_ac_) = 1.0;
    if (i_p_ >= 0) {
      out.g[ineq] = x[i_p_];
      out.jac_g(ineq++, i_p_) = 1.0;
    }

    if (b_.lo || b_.hi) {
      const ThermalState st = state(x);
      const SurrogateMean m = surrogate_mean(c_, st.t_cab, st.t_si, st.t_rh);
      Eigen::RowVectorXd grad = Eigen::RowVectorXd::Zero(n);
      grad[i_cab_] = kTUnit * m.d_cab;
      grad[i_si_] = kTUnit * m.d_si;
      if (i_rh_ >= 0) grad[i_rh_] = kTUnit * m.d_rh;
      if (b_.equality) {
        out.c[row] = m.value - *b_.lo;
        out.jac_c.row(row) = grad;
        ++row;
      } else {
        if (b_.lo) {
          out.g[ineq] = m.value - *b_.lo;
          out.jac_g.row(ineq++) = grad;
        }
        if (b_.hi) {
          out.g[ineq] = *b_.hi - m.value;
          out.jac_g.row(ineq++) = -grad;
        }
      }
    }
  }

 private:
  const Context& c_;
  PmvBounds b_;
  int i_cab_ = 0, i_rh_ = -1, i_si_ = 0, i_so_ = 0, i_hp_ = 0, i_ac_ = 0, i_p_ = -1;
  int n_ = 0, me_ = 0, mi_ = 0;
};

InteriorPointResult run_program(const Context& c, const WindowProgram& prog, const VectorXd& x0,
                                const InteriorPointResult* previous = nullptr) {
  InteriorPointOptions opts;
  opts.tolerance = 1e-9;
  int spent = 0;
  if (previous) {
    // correction rounds only nudge the PMV bounds
    InteriorPointOptions near = opts;
    near.mu_initial = 1e-6;
    InteriorPointResult r = solve_interior_point(prog, x0, near, *previous);
    if (r.converged) return r;
    spent = r.iterations;
  }
  InteriorPointResult r = solve_interior_point(prog, x0, opts);
  r.iterations += spent;
  if (!r.converged) {
    const VectorXd cold = prog.initial_point();
    if ((cold - x0).norm() > 0.0) {
      const int used = r.iterations;
      r = solve_interior_point(prog, cold, opts);
      r.iterations += used;
    }
  }
  if (!r.converged) {
    // restart from where it stalled with a fresh Hessian approximation
    const int used = r.iterations;
    InteriorPointOptions warm = opts;
    warm.mu_initial = 1e-4;
    r = solve_interior_point(prog, r.x, warm);
    r.iterations += used;
  }
  if (!r.converged) {
    NlpEvaluation ev;
    prog.evaluate(r.x, ev);
    std::vector<double> residuals(ev.c.data(), ev.c.data() + ev.c.size());
    for (double& v : residuals) v *= kPUnit;
    throw SolverError(fmt::format("scenario '{}': interior-point method stopped at KKT error {:.3g}",
                                  c.scn.id, r.kkt_error),
                      residuals);
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

SolveResult solve_fixed_pmv(const Scenario& scn, const ThermalModel& model, bool rh_on) {
  if (!model.spec().psi_tgt) throw std::invalid_argument("comfort spec has no PMV target");
  return solve_fixed_pmv(scn, model, *model.spec().psi_tgt, rh_on);
}

SolveResult solve_fixed_pmv(const Scenario& scn, const ThermalModel& model, double psi_tgt, bool rh_on) {
  if (!(psi_tgt >= -3.0 && psi_tgt <= 3.0)) throw std::invalid_argument("PMV target must lie in [-3, 3]");
  const Context c(scn, model, rh_on);
  if (c.occ.empty()) return solve_root(c, false, 0.0);
  return solve_root(c, true, psi_tgt);
}

SolveResult solve_window_rootfind(const Scenario& scn, const ThermalModel& model, bool rh_on) {
  const Context c(scn, model, rh_on);
  SolveResult passive = solve_root(c, false, 0.0);
  if (c.occ.empty()) return passive;
  const ComfortSpec& spec = model.spec();
  const ThermalState& st = passive.state;
  const double psi = exact_mean(c, st.t_cab, st.t_si, st.t_rh);
  std::optional<double> target;
  if (spec.lower_bound_active() && psi < spec.psi_min) target = spec.psi_min;
  if (spec.upper_bound_active() && psi > spec.psi_max) target = spec.psi_max;
  if (!target) return passive;
  SolveResult active = solve_root(c, true, *target);
  active.iterations += passive.iterations;
  return active;
}

SolveResult solve_window_opt(const Scenario& scn, const ThermalModel& model, bool rh_on) {
  const Context c(scn, model, rh_on);
  const ComfortSpec& spec = model.spec();

  std::optional<double> lo, hi;
  if (!c.occ.empty()) {
    if (spec.lower_bound_active()) lo = spec.psi_min;
    if (spec.upper_bound_active()) hi = spec.psi_max;
  }
  PmvBounds bounds{lo, hi, lo && hi && *lo == *hi};

  VectorXd x = WindowProgram(c, bounds).initial_point();
  int iterations = 0;
  std::optional<InteriorPointResult> last;
  for (int round = 0; round < 12; ++round) {
    const WindowProgram prog(c, bounds);
    last = run_program(c, prog, x, last ? &*last : nullptr);
    iterations += last->iterations;
    x = last->x;

    ThermalState st = prog.state(x);
    double q_hp = prog.heating(x);
    double q_ac = prog.cooling(x);
    if (q_hp < kSnapPower) q_hp = 0.0;
    if (q_ac < kSnapPower) q_ac = 0.0;
    st.q_hvac = q_hp - q_ac;
    if (!lo && !hi) return finish(c, st, SolverKind::optimization, iterations);

    // The surrogate only approximates the PMV. Shift its bounds by the error
    // seen at the current solution until the exact mean PMV meets the window.
    const double exact = exact_mean(c, st.t_cab, st.t_si, st.t_rh);
    const SurrogateMean sur = surrogate_mean(c, st.t_cab, st.t_si, st.t_rh);
    const double err = exact - sur.value;
    bool done = true;
    if (bounds.equality) {
      if (std::abs(exact - *lo) > kPmvTolerance) {
        bounds.lo = bounds.hi = *lo - err;
        done = false;
      }
    } else {
      if (lo) {
        const bool active = sur.value - *bounds.lo <= 1e-6;
        if (exact < *lo - kPmvTolerance || (active && exact > *lo + kPmvSlack)) {
          bounds.lo = *lo - err;
          done = false;
        }
      }
      if (hi) {
        const bool active = *bounds.hi - sur.value <= 1e-6;
        if (exact > *hi + kPmvTolerance || (active && exact < *hi - kPmvSlack)) {
          bounds.hi = *hi - err;
          done = false;
        }
      }
    }
    if (done) return finish(c, st, SolverKind::optimization, iterations);
  }
  throw SolverError(fmt::format("scenario '{}': surrogate correction did not reach the exact PMV window", scn.id),
                    {});
}

SolveResult solve_window(const Scenario& scn, const ThermalModel& model, bool rh_on, SolverKind kind) {
  return kind == SolverKind::optimization ? solve_window_opt(scn, model, rh_on)
                                          : solve_window_rootfind(scn, model, rh_on);
}

SolveResult solve_best(const Scenario& scn, const ThermalModel& model, SolverKind kind) {
  SolveResult off = solve_window(scn, model, false, kind);
  // the panel branch never draws less than nothing, and ties go to off
  if (!model.config().uses_radiant_heaters() || off.p_tot <= 0.0) return off;
  SolveResult on = solve_window(scn, model, true, kind);
  return on.p_tot < off.p_tot ? on : off;
}

}  // namespace cabintherm
