#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cabintherm/errors.hpp"
#include "cabintherm/interior_point.hpp"
#include "cabintherm/newton.hpp"
#include "cabintherm/scenario.hpp"
#include "cabintherm/setup.hpp"
#include "cabintherm/solver.hpp"
#include "cabintherm/units.hpp"

using namespace cabintherm;
using doctest::Approx;

namespace {

Scenario winter() {
  Scenario s;
  s.id = "winter";
  s.month = 1;
  s.t_inf = to_kelvin(-5.0);
  s.n_pass = 30;
  s.zeta_door = 0.1;
  s.zeta_sh = 0.45;
  return s;
}

Scenario summer() {
  Scenario s;
  s.id = "summer";
  s.month = 7;
  s.t_inf = to_kelvin(32.0);
  s.beta = deg_to_rad(55.0);
  s.i_dni = 750.0;
  s.i_dhi = 120.0;
  s.n_pass = 40;
  s.zeta_door = 0.1;
  s.zeta_sh = 0.25;
  return s;
}

BusConfig with_rh(BusConfig cfg, double area = 4.0, double t_c = 90.0) {
  cfg.rh_enabled = true;
  cfg.a_rh = area;
  cfg.t_rh_tgt = to_kelvin(t_c);
  return cfg;
}

BusConfig ptc() {
  BusConfig cfg;
  cfg.cop_heating = CopCurve::constant(1.0, CopMode::heating);
  return cfg;
}

double largest(const SolveResult& r) { return std::max(largest_flow(r.flows), 1.0); }

void check_result(const SolveResult& r, const Scenario& scn, const ThermalModel& m) {
  const auto res = balance_residuals(r.state, scn, m.config(), r.rh_used);
  for (double v : res) CHECK(std::abs(v) <= 1e-6 * largest(r));
  CHECK(r.p_tot == Approx(r.flows.p_rh + r.flows.p_hvac));
  CHECK(r.p_tot >= 0.0);
  CHECK(r.state.p_rh >= 0.0);
  CHECK(r.q_hp * r.q_ac <= 1e-6);
  const bool passive = r.state.q_hvac == 0.0 && r.state.p_rh == 0.0;
  CHECK(passive == (r.mode == HvacMode::passive));
  if (r.state.p_rh > 0.0) CHECK(r.state.t_rh >= r.state.t_cab);
  if (r.mean_psi) {
    const ComfortSpec& spec = m.spec();
    CHECK(*r.mean_psi >= spec.psi_min - 1e-4);
    CHECK(*r.mean_psi <= spec.psi_max + 1e-4);
  }
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("newton on a small system") {
  const NewtonSystem sys = [](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd& j) {
    r.resize(2);
    j.resize(2, 2);
    r << x[0] * x[0] + x[1] * x[1] - 4.0, x[0] - x[1];
    j << 2 * x[0], 2 * x[1], 1.0, -1.0;
  };
  const NewtonResult r = solve_newton(sys, Eigen::Vector2d(3.0, 0.5), Eigen::Vector2d(1e-12, 1e-12));
  CHECK(r.converged);
  CHECK(r.x[0] == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r.x[1] == Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("interior point on a small program") {
  // min (x-2)^2 + (y-1)^2  s.t.  x + y = 2,  x >= 0,  y >= 0.8
  struct Prog : NonlinearProgram {
    int num_variables() const override { return 2; }
    int num_equalities() const override { return 1; }
    int num_inequalities() const override { return 2; }
    void evaluate(const Eigen::VectorXd& x, NlpEvaluation& o) const override {
      o.f = (x[0] - 2) * (x[0] - 2) + (x[1] - 1) * (x[1] - 1);
      o.grad_f = Eigen::Vector2d(2 * (x[0] - 2), 2 * (x[1] - 1));
      o.c = Eigen::VectorXd::Constant(1, x[0] + x[1] - 2);
      o.jac_c = Eigen::MatrixXd(1, 2);
      o.jac_c << 1, 1;
      o.g = Eigen::Vector2d(x[0], x[1] - 0.8);
      o.jac_g = Eigen::MatrixXd::Identity(2, 2);
    }
  } prog;
  const InteriorPointResult r = solve_interior_point(prog, Eigen::Vector2d(5.0, 5.0));
  CHECK(r.converged);
  CHECK(r.x[0] == Approx(1.2).epsilon(1e-8));
  CHECK(r.x[1] == Approx(0.8).epsilon(1e-8));
  CHECK(r.z[1] > 0.0);
}

TEST_CASE("fixed PMV target: winter heats, summer cools") {
  const ThermalModel m(BusConfig{}, ComfortSpec{});
  const Scenario w = winter();
  const SolveResult r = solve_fixed_pmv(w, m, -1.0, false);
  CHECK(r.state.q_hvac > 0.0);
  CHECK(r.state.t_cab > w.t_inf);
  CHECK(r.mode == HvacMode::heating);
  CHECK(*r.mean_psi == Approx(-1.0).epsilon(1e-6));
  check_result(r, w, m.with_window(-1.0, -1.0));

  const Scenario s = summer();
  const SolveResult h = solve_fixed_pmv(s, m, 1.0, false);
  CHECK(h.state.q_hvac < 0.0);
  CHECK(h.mode == HvacMode::cooling);
  CHECK(*h.mean_psi == Approx(1.0).epsilon(1e-6));

  // the model's spec carries no target
  CHECK_THROWS_AS(solve_fixed_pmv(w, m, false), std::invalid_argument);
}

TEST_CASE("fixed PMV target equal to the passive PMV needs no HVAC") {
  const ThermalModel m(BusConfig{}, ComfortSpec{});
  Scenario s = winter();
  s.t_inf = to_kelvin(12.0);
  const SolveResult passive = solve_window_rootfind(s, m.with_window(-3.0, 3.0), false);
  CHECK(passive.mode == HvacMode::passive);
  const SolveResult r = solve_fixed_pmv(s, m, *passive.mean_psi, false);
  CHECK(std::abs(r.state.q_hvac) < 1.0);
}

TEST_CASE("window solve: passive inside, pinned at the violated limit outside") {
  const ThermalModel m(BusConfig{}, ComfortSpec{});
  Scenario mild = winter();
  mild.t_inf = to_kelvin(14.0);
  for (SolverKind k : {SolverKind::rootfind, SolverKind::optimization}) {
    const SolveResult r = solve_window(mild, m, false, k);
    CHECK(r.mode == HvacMode::passive);
    CHECK(r.p_tot == 0.0);
  }
  const Scenario cold = winter();
  for (SolverKind k : {SolverKind::rootfind, SolverKind::optimization}) {
    const SolveResult r = solve_window(cold, m, false, k);
    CHECK(*r.mean_psi == Approx(-1.0).epsilon(1e-6));
    check_result(r, cold, m);
  }
  // the boundary is optimal: targets deeper inside the window cost more
  const double at_bound = solve_fixed_pmv(cold, m, -1.0, false).p_tot;
  for (double tgt : {-0.9, -0.5, 0.0}) CHECK(solve_fixed_pmv(cold, m, tgt, false).p_tot > at_bound);

  const ThermalModel open = m.with_window(-3.0, 3.0);
  for (const Scenario& s : {cold, summer()}) {
    CHECK(solve_window(s, open, false, SolverKind::rootfind).mode == HvacMode::passive);
    CHECK(solve_window(s, open, false, SolverKind::optimization).mode == HvacMode::passive);
  }
}

TEST_CASE("both routes agree and never heat and cool at once") {
  const ModelSetup setup = setup_from_json_text("{}");
  const ScenarioSet set = synthesize_dataset(40, 3);
  for (const auto& name : {"PTC-AC", "HP-AC+RH"}) {
    const ThermalModel base = setup.model(setup.concept_config(name));
    for (double w : {0.0, 0.5, 1.0}) {
      const ThermalModel m = base.with_window(-w, w);
      for (const Scenario& s : set) {
        const SolveResult a = solve_best(s, m, SolverKind::optimization);
        const SolveResult b = solve_best(s, m, SolverKind::rootfind);
        CAPTURE(s.id);
        CAPTURE(w);
        CHECK(std::abs(a.p_tot - b.p_tot) / std::max(a.p_tot, 1.0) <= 1e-4);
        CHECK(std::min(a.q_hp, a.q_ac) <= 1e-6);
        check_result(a, s, m);
        check_result(b, s, m);
      }
    }
  }
}

TEST_CASE("enlarging the window never costs more") {
  const ThermalModel base(BusConfig{}, ComfortSpec{});
  for (const Scenario& s : {winter(), summer()}) {
    double prev = 1e300;
    for (double w = 0.0; w <= 2.0001; w += 0.25) {
      const double p = solve_best(s, base.with_window(-w, w)).p_tot;
      CHECK(p <= prev * (1 + 1e-6) + 1e-6);
      prev = p;
    }
  }
}

TEST_CASE("PTC heating draws exactly its heat") {
  const ThermalModel m(ptc(), ComfortSpec{});
  const SolveResult r = solve_window_opt(winter(), m, false);
  CHECK(r.flows.p_hvac == Approx(r.state.q_hvac).epsilon(1e-12));
}

TEST_CASE("radiant heater selection") {
  const ThermalModel hot(with_rh(BusConfig{}), ComfortSpec{});
  const SolveResult s = solve_best(summer(), hot);
  CHECK_FALSE(s.rh_used);

  BusConfig zero = with_rh(BusConfig{});
  zero.a_rh = 0.0;
  const ThermalModel m0(zero, ComfortSpec{});
  const ThermalModel off(BusConfig{}, ComfortSpec{});
  CHECK(solve_best(winter(), m0).p_tot == solve_window(winter(), off, false, SolverKind::optimization).p_tot);

  const ThermalModel big(with_rh(ptc(), 4.0, 90.0), ComfortSpec{});
  const SolveResult on = solve_window_opt(winter(), big, true);
  const SolveResult no = solve_window_opt(winter(), big, false);
  CHECK(on.p_tot <= no.p_tot);
  CHECK(on.state.t_rh == Approx(to_kelvin(90.0)).epsilon(1e-12));
  CHECK(on.state.p_rh > 0.0);
  const SolveResult best = solve_best(winter(), big);
  CHECK(best.rh_used);
  CHECK(best.p_tot == on.p_tot);
  check_result(best, winter(), big);

  // rh on solves six unknowns, off four: reported panel temperature is the shell's
  CHECK(no.state.t_rh == no.state.t_si);
  CHECK(no.state.p_rh == 0.0);
}

TEST_CASE("empty bus") {
  const ThermalModel m(BusConfig{}, ComfortSpec{});
  Scenario s = winter();
  s.n_pass = 0;
  for (SolverKind k : {SolverKind::rootfind, SolverKind::optimization}) {
    const SolveResult r = solve_best(s, m, k);
    CHECK(r.mode == HvacMode::passive);
    CHECK_FALSE(r.mean_psi.has_value());
    CHECK_FALSE(r.ppd.has_value());
    CHECK(r.per_passenger_pmv.empty());
  }
}

TEST_CASE("perturbing a heated cabin upward drives its air balance negative") {
  const ThermalModel m(BusConfig{}, ComfortSpec{});
  const Scenario w = winter();
  const SolveResult r = solve_fixed_pmv(w, m, -1.0, false);
  ThermalState hotter = r.state;
  hotter.t_cab += 1.0;
  CHECK(balance_residuals(hotter, w, m.config(), false)[0] < 0.0);
}

TEST_CASE("occupancy") {
  const ThermalModel m(with_rh(BusConfig{}), ComfortSpec{});
  Scenario s = winter();
  const Occupancy a = m.occupancy(s);
  const Occupancy b = m.occupancy(s);
  CHECK(a.size() == s.n_pass);
  for (int i = 0; i < a.size(); ++i) CHECK(a.passengers[i].x == b.passengers[i].x);
  int total = 0;
  for (int c : a.group_count) total += c;
  CHECK(total == s.n_pass);
  s.n_pass = m.layout().grid_capacity() + 1;
  CHECK_THROWS_AS(m.occupancy(s), DataError);
  // placement depends on the id, not on where the scenario sits in a batch
  Scenario t = winter();
  t.id = "other";
  bool differs = false;
  const Occupancy c = m.occupancy(t);
  for (int i = 0; i < c.size(); ++i) differs = differs || c.passengers[i].x != a.passengers[i].x;
  CHECK(differs);
}

}  // TEST_SUITE
