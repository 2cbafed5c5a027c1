// Acceptance report: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <fmt/core.h>

#include "cabintherm/analysis.hpp"
#include "cabintherm/batch.hpp"
#include "cabintherm/comfort.hpp"
#include "cabintherm/geometry.hpp"
#include "cabintherm/model.hpp"
#include "cabintherm/scenario.hpp"
#include "cabintherm/setup.hpp"
#include "cabintherm/units.hpp"
#include "oracles.hpp"

using namespace cabintherm;
namespace fs = std::filesystem;

namespace {

// pinned tolerances
constexpr double kSolverAgreement = 1e-4;      // relative P_tot, per scenario
constexpr double kAgreementFloorW = 1.0;       // denominator floor for passive (0 W) scenarios
constexpr double kComplementarity = 1e-6;      // W^2
constexpr double kResidual = 1e-6;             // relative to the largest flow
constexpr double kViewFactorMc = 1e-3;         // absolute
constexpr double kViewFactorExact = 1e-9;
constexpr double kIso = 0.05;
constexpr double kSurrogate = 0.05;
constexpr double kTimeBudget = 60.0;  // s

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  fmt::print("criterion {}: {}  {}\n", n, ok ? "PASS" : "FAIL", detail);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double worst_residual(const SolveResult& r, const Scenario& s, const ThermalModel& m) {
  const auto res = balance_residuals(r.state, s, m.config(), r.rh_used);
  const double scale = std::max(largest_flow(r.flows), 1.0);
  double worst = 0.0;
  for (double v : res) worst = std::max(worst, std::abs(v) / scale);
  return worst;
}

// ---------------------------------------------------------------- 1, 2, 3

struct ResidualTally {
  double worst = 0.0;
  long checked = 0;
  void add(const SolveResult& r, const Scenario& s, const ThermalModel& m) {
    worst = std::max(worst, worst_residual(r, s, m));
    ++checked;
  }
};

void solver_agreement(const ModelSetup& setup, ResidualTally& residuals) {
  const ScenarioSet set = synthesize_dataset(500, setup.run.seed);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_rel = 0.0, worst_product = 0.0;
  std::string worst_at;
  long compared = 0;
  for (const NamedModel& nm : setup.concept_models()) {
    for (double w : {0.0, 0.5, 1.0}) {
      const ThermalModel m = nm.model.with_window(-w, w);
      const auto opt = solve_batch(set.scenarios, m, {SolverKind::optimization, 1});
      const auto root = solve_batch(set.scenarios, m, {SolverKind::rootfind, 1});
      for (std::size_t i = 0; i < opt.size(); ++i) {
        const double a = opt[i].p_tot, b = root[i].p_tot;
        const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), kAgreementFloorW});
        if (rel > worst_rel) {
          worst_rel = rel;
          worst_at = fmt::format("{} {} w={}", nm.name, opt[i].scenario_id, w);
        }
        worst_product = std::max({worst_product, opt[i].q_hp * opt[i].q_ac, root[i].q_hp * root[i].q_ac});
        residuals.add(opt[i], set.scenarios[i], m);
        residuals.add(root[i], set.scenarios[i], m);
        ++compared;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, worst_rel <= kSolverAgreement && elapsed < kTimeBudget,
         fmt::format("{} pairs (4 concepts x 3 windows x 500), worst relative P_tot gap {:.2e} ({}), {:.1f} s",
                     compared, worst_rel, worst_at, elapsed));
  report(2, worst_product <= kComplementarity,
         fmt::format("largest Q_hp*Q_ac {:.2e} W^2 over {} solves", worst_product, 2 * compared));
}

// ---------------------------------------------------------------- 4

// The ceiling minus the panels, as rectangles facing down.
std::vector<Rect3> ceiling_remainder(const CabinLayout& c) {
  std::vector<Rect3> out;
  auto add = [&](double x0, double x1, double y0, double y1) {
    if (x1 - x0 > 1e-12 && y1 - y0 > 1e-12)
      out.emplace_back(Vec3(x0, y0, c.height), Vec3(0, y1 - y0, 0), Vec3(x1 - x0, 0, 0));
  };
  if (c.panels.empty()) {
    add(0, c.length, 0, c.width);
    return out;
  }
  const double y0 = c.panels.front().extent(1).lo, y1 = c.panels.front().extent(1).hi;
  add(0, c.length, 0, y0);
  add(0, c.length, y1, c.width);
  std::vector<Interval> xs;
  for (const Rect3& p : c.panels) xs.push_back(p.extent(0));
  std::sort(xs.begin(), xs.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
  double x = 0.0;
  for (const Interval& i : xs) {
    add(x, i.lo, y0, y1);
    x = i.hi;
  }
  add(x, c.length, y0, y1);
  return out;
}

void view_factors() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> P(-1.0, 1.0), S(0.2, 1.5), G(0.2, 1.5);
  double worst_mc = 0.0, worst_recip = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Rect3 a(Vec3(P(rng), P(rng), 0), Vec3(S(rng), 0, 0), Vec3(0, S(rng), 0));  // facing +z
    Rect3 b = a;
    if (i % 2 == 0) {
      b = Rect3(Vec3(P(rng), P(rng), G(rng)), Vec3(0, S(rng), 0), Vec3(S(rng), 0, 0));  // facing -z
    } else {
      // wall at x = x0 facing -x, partly or fully above a
      b = Rect3(Vec3(a.extent(0).hi + 0.5 * P(rng) + 0.5, P(rng), 0.5 * (P(rng) + 1.0) * 0.3),
                Vec3(0, 0, S(rng)), Vec3(0, S(rng), 0));
    }
    const double f = view_factor(a, b);
    const double mc = oracle::mc_view_factor(a, b, 32, 32, 1000 + i);
    worst_mc = std::max(worst_mc, std::abs(f - mc));
    worst_recip = std::max(worst_recip, std::abs(a.area() * f - b.area() * view_factor(b, a)));
  }

  // per-face closure: panels plus shell (walls, floor, ceiling remainder)
  CabinLayout cabin = CabinLayout::with_panel_strip(4.0);
  cabin.passengers = place_passengers(40, 11, cabin);
  const double L = cabin.length, W = cabin.width, H = cabin.height;
  std::vector<Rect3> shell{
      Rect3(Vec3(0, 0, 0), Vec3(L, 0, 0), Vec3(0, W, 0)),  // floor
      Rect3(Vec3(0, 0, 0), Vec3(0, W, 0), Vec3(0, 0, H)),  // front
      Rect3(Vec3(L, 0, 0), Vec3(0, 0, H), Vec3(0, W, 0)),  // rear
      Rect3(Vec3(0, 0, 0), Vec3(0, 0, H), Vec3(L, 0, 0)),
      Rect3(Vec3(0, W, 0), Vec3(L, 0, 0), Vec3(0, 0, H))};
  for (const Rect3& r : ceiling_remainder(cabin)) shell.push_back(r);
  double worst_closure = 0.0;
  for (const PassengerCuboid& p : cabin.passengers) {
    double face_area = 0.0, weighted_rh = 0.0;
    for (const Rect3& f : p.faces()) {
      double to_rh = 0.0, to_shell = 0.0;
      for (const Rect3& r : cabin.panels) to_rh += view_factor(f, r);
      for (const Rect3& r : shell) to_shell += view_factor(f, r);
      worst_closure = std::max(worst_closure, std::abs(to_rh + to_shell - 1.0));
      face_area += f.area();
      weighted_rh += f.area() * to_rh;
    }
    // the weight the comfort model uses is the same area-weighted share
    worst_closure = std::max(worst_closure, std::abs(weighted_rh / face_area - panel_view_weight(p, cabin)));
  }
  report(4, worst_mc <= kViewFactorMc && worst_recip <= kViewFactorExact && worst_closure <= kViewFactorExact,
         fmt::format("50 geometries: worst |analytic - MC(1.05e6)| {:.2e}, reciprocity {:.1e}, closure {:.1e} "
                     "over 40 passengers",
                     worst_mc, worst_recip, worst_closure));
}

// ---------------------------------------------------------------- 5

void comfort_engine() {
  const ComfortSpec base;
  double worst_iso = 0.0;
  for (const auto& c : oracle::kIsoTable) {
    ComfortSpec spec = base;
    spec.v_cab = c.v;
    spec.phi_cab = c.rh / 100.0;
    spec.met = c.met;
    const double got = pmv(to_kelvin(c.ta), to_kelvin(c.tr), c.clo, spec);
    worst_iso = std::max(worst_iso, std::abs(got - c.pmv));
  }
  const bool ppd_exact = ppd(0.0) == 5.0;

  const PmvSurrogate s = PmvSurrogate::fit_default(base);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> T(s.t_min(), s.t_max()), C(s.clo_min(), s.clo_max());
  double worst_sur = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double ta = T(rng), tr = T(rng), clo = C(rng);
    worst_sur = std::max(worst_sur, std::abs(s(ta, tr, clo) - pmv(ta, tr, clo, base)));
  }
  report(5, worst_iso <= kIso && ppd_exact && worst_sur <= kSurrogate,
         fmt::format("ISO table worst {:.3f} over {} cases, ppd(0) = {}, surrogate worst {:.4f} on 1e4 points",
                     worst_iso, std::size(oracle::kIsoTable), ppd(0.0), worst_sur));
}

// ---------------------------------------------------------------- 6

void spot_values() {
  const BusConfig cfg;
  const double door = door_loss(293.15, 273.15, 1.0, cfg);
  const double wall = irradiance_wall_mean(deg_to_rad(30.0), 800.0, 100.0);
  const double rad = radiative_loss_outer(283.15, 273.15, cfg);
  const bool ok = std::abs(door / 5.10e4 - 1.0) <= 0.01 && std::abs(wall - 270.5) <= 0.1 &&
                  std::abs(rad / 7.35e3 - 1.0) <= 0.01;
  report(6, ok, fmt::format("door loss {:.4g} W (5.10e4 +-1%), wall irradiance {:.2f} W/m2 (270.5 +-0.1), "
                            "outer radiation {:.4g} W (7.35e3 +-1%)",
                            door, wall, rad));
}

// ---------------------------------------------------------------- 7

void seasonal(const ModelSetup& setup, ResidualTally& residuals) {
  const ScenarioSet set = synthesize_dataset(7500, setup.run.seed);
  std::vector<std::pair<std::string, AnnualSummary>> at1;
  for (const NamedModel& nm : setup.concept_models()) {
    const ThermalModel m = nm.model.with_window(-1.0, 1.0);
    const auto res = solve_batch(set.scenarios, m, {SolverKind::optimization, 1});
    for (std::size_t i = 0; i < res.size(); ++i) residuals.add(res[i], set.scenarios[i], m);
    at1.emplace_back(nm.name, aggregate_annual(res, set));
  }
  auto find = [&](const std::string& n) -> const AnnualSummary& {
    for (auto& [name, s] : at1)
      if (name == n) return s;
    throw std::runtime_error("missing concept " + n);
  };
  const AnnualSummary &ptc = find("PTC-AC"), &hp = find("HP-AC"), &ptc_rh = find("PTC-AC+RH"),
                      &hp_rh = find("HP-AC+RH");
  const double a = 100.0 * (1.0 - hp.p_tot / ptc.p_tot);
  const double b = 100.0 * (1.0 - ptc_rh.p_tot / ptc.p_tot);
  const double c = 100.0 * (1.0 - hp_rh.p_tot / hp.p_tot);
  const double ratio = ptc.q_heat / ptc.q_cool;

  // full single-threaded sweep of the slowest concept
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = pareto_sweep(set, setup.model(setup.concept_config("PTC-AC+RH")), setup.run.half_widths,
                                  {SolverKind::optimization, 1});
  const double elapsed = seconds_since(t0);
  double min_ppd = 1e9;
  for (const auto& p : curve) min_ppd = std::min(min_ppd, p.ppd);
  for (auto& [name, s] : at1) min_ppd = std::min(min_ppd, s.ppd.value());

  const bool ok = a >= 40.0 && a <= 70.0 && b >= 0.0 && b <= 15.0 && c <= 2.0 && ratio > 1.0 &&
                  min_ppd >= 5.0 && elapsed < kTimeBudget;
  report(7, ok,
         fmt::format("(a) HP-AC {:.1f}% below PTC-AC [40, 70]; (b) PTC-AC+RH {:.1f}% below PTC-AC [0, 15]; "
                     "(c) HP-AC+RH {:.2f}% below HP-AC [<= 2]; (d) heating/cooling {:.2f} (> 1); "
                     "(e) lowest PPD {:.2f}% (>= 5); 21-window sweep {:.1f} s",
                     a, b, c, ratio, min_ppd, elapsed));
  fmt::print("  annual P_tot at [-1, 1]: PTC-AC {:.1f} W, HP-AC {:.1f} W, PTC-AC+RH {:.1f} W, HP-AC+RH {:.1f} W; "
             "Q_heat {:.1f} W, Q_cool {:.1f} W\n",
             ptc.p_tot, hp.p_tot, ptc_rh.p_tot, hp_rh.p_tot, ptc.q_heat, ptc.q_cool);
}

// ---------------------------------------------------------------- 8

void sensitivity(const ModelSetup& setup) {
  const ScenarioSet set = synthesize_dataset(7500, setup.run.seed);
  const std::vector<std::string> params{"gamma_hp", "gamma_ac", "k_body", "tau_win", "alpha_paint"};
  const auto entries = oat_sensitivity(set, setup.model(setup.concept_config("HP-AC")), params, 0.01,
                                       {SolverKind::optimization, 1});
  auto get = [&](const std::string& p, int dir) {
    for (const auto& e : entries)
      if (e.parameter == p && e.direction == dir) return e.rel_change;
    throw std::runtime_error("missing sensitivity entry " + p);
  };
  const double hp = get("gamma_hp", 1), ac = get("gamma_ac", 1), kb = get("k_body", -1);
  const double solar = std::max({std::abs(get("tau_win", 1)), std::abs(get("tau_win", -1)),
                                 std::abs(get("alpha_paint", 1)), std::abs(get("alpha_paint", -1))});
  const bool ok = hp < 0.0 && hp < ac && kb < 0.0 && solar < std::abs(hp);
  report(8, ok,
         fmt::format("HP-AC, 7500 scenarios: +1% gamma_hp {:+.3f}%, +1% gamma_ac {:+.3f}%, -1% k_body {:+.3f}%, "
                     "largest solar |effect| {:.3f}%",
                     hp, ac, kb, solar));
}

// ---------------------------------------------------------------- 9

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CABINTHERM_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void determinism() {
  const fs::path root = fs::path(CABINTHERM_TEST_WORKDIR) / "acceptance";
  fs::remove_all(root);
  bool ok = true;
  // the second run uses two threads; the outputs must not notice
  const std::vector<std::pair<std::string, int>> runs{{"first", 1}, {"second", 2}};
  for (const auto& [name, jobs] : runs) {
    const std::string dir = (root / name).string();
    ok = ok && run_cli(fmt::format("--out {} --seed 42 gen -n 500", dir)) == 0;
    ok = ok && run_cli(fmt::format("--out {} --scenarios {}/scenarios.csv --seed 42 --jobs {} sweep", dir, dir,
                                   jobs)) == 0;
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(root / "first")) {
    if (entry.path().extension() != ".csv") continue;
    const std::string a = slurp(entry.path());
    const std::string b = slurp(root / "second" / entry.path().filename());
    ok = ok && !a.empty() && a == b;
    ++compared;
  }
  ok = ok && compared >= 6;
  report(9, ok, fmt::format("gen -n 500 + 21-window sweep of 4 concepts, run twice: {} CSV files compared", compared));
}

}  // namespace

int main() {
  const ModelSetup setup = setup_from_json_text("{}");
  ResidualTally residuals;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    solver_agreement(setup, residuals);
    view_factors();
    comfort_engine();
    spot_values();
    seasonal(setup, residuals);
    report(3, residuals.worst <= kResidual,
           fmt::format("worst balance residual {:.2e} of the largest flow over {} returned states",
                       residuals.worst, residuals.checked));
    sensitivity(setup);
    determinism();
  } catch (const std::exception& e) {
    fmt::print("aborted: {}\n", e.what());
    return 2;
  }
  fmt::print("{} failing criteria, {:.0f} s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
