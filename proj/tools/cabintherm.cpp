// cabintherm: steady-state bus cabin HVAC simulator and energy/comfort
// optimizer. Subcommands: solve, sweep, sensitivity, monthly, gen.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cabintherm/analysis.hpp"
#include "cabintherm/batch.hpp"
#include "cabintherm/errors.hpp"
#include "cabintherm/report.hpp"
#include "cabintherm/scenario.hpp"
#include "cabintherm/setup.hpp"
#include "cabintherm/solver.hpp"
#include "cabintherm/units.hpp"

#ifndef CABINTHERM_VERSION
#define CABINTHERM_VERSION "dev"
#endif

namespace fs = std::filesystem;
using namespace cabintherm;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kData = 3, kSolver = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::string scenarios;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string solver;
};

struct Window {
  std::optional<double> psi_min;
  std::optional<double> psi_max;
  std::optional<double> psi_tgt;
};

// Files are written next to their destination and renamed into place, so a
// reader never sees a half-written output.
void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DataError(fmt::format("cannot write {}", tmp.string()));
    f << content;
    f.flush();
    if (!f) throw DataError(fmt::format("error while writing {}", tmp.string()));
  }
  fs::rename(tmp, path);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

class Run {
 public:
  Run(const Globals& g, std::string command) : g_(g), command_(std::move(command)) {
    start_ = std::chrono::steady_clock::now();
    config_path_ = g.config;
    if (config_path_.empty()) {
      if (const char* env = std::getenv("CABINTHERM_CONFIG"); env && *env) config_path_ = env;
    }
    setup_ = config_path_.empty() ? setup_from_json_text("{}", "<defaults>") : load_setup(config_path_);
    if (g.seed) setup_.run.seed = *g.seed;
    if (g.jobs) setup_.run.jobs = *g.jobs;
    if (!g.solver.empty()) setup_.run.solver = g.solver;
    if (!g.scenarios.empty()) setup_.run.scenarios = g.scenarios;
    if (setup_.run.jobs < 0) throw UsageError("--jobs must be >= 0");
  }

  ModelSetup& setup() { return setup_; }
  fs::path out() const { return g_.out; }

  BatchOptions batch(SolverKind kind) const { return {kind, setup_.run.jobs}; }

  std::vector<SolverKind> solvers() const {
    if (setup_.run.solver == "rootfind") return {SolverKind::rootfind};
    if (setup_.run.solver == "both") return {SolverKind::optimization, SolverKind::rootfind};
    return {SolverKind::optimization};
  }

  ScenarioSet scenarios() {
    if (!setup_.run.scenarios) throw UsageError("no scenario file: pass --scenarios or set run.scenarios");
    std::vector<std::string> warnings;
    ScenarioSet set = load_scenarios_csv(*setup_.run.scenarios, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    scenario_source_ = *setup_.run.scenarios;
    return set;
  }

  void set_scenario_source(std::string s) { scenario_source_ = std::move(s); }

  void write(const std::string& name, const std::string& content) {
    write_atomic(out() / name, content);
    outputs_.push_back(name);
  }

  void finish() {
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m{{"command", command_},
           {"config", config_path_.empty() ? json(nullptr) : json(config_path_)},
           {"scenario_source", scenario_source_.empty() ? json(nullptr) : json(scenario_source_)},
           {"seed", setup_.run.seed},
           {"jobs", setup_.run.jobs},
           {"solver", setup_.run.solver},
           {"output_directory", g_.out},
           {"outputs", outputs_},
           {"tool_version", CABINTHERM_VERSION},
           {"wall_clock_seconds", seconds}};
    write_atomic(out() / "manifest.json", m.dump(2) + "\n");
  }

 private:
  const Globals& g_;
  std::string command_;
  std::string config_path_;
  std::string scenario_source_;
  ModelSetup setup_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

ThermalModel model_with_window(const ModelSetup& setup, const BusConfig& cfg, const Window& w) {
  ComfortSpec spec = setup.comfort;
  if (w.psi_min) spec.psi_min = *w.psi_min;
  if (w.psi_max) spec.psi_max = *w.psi_max;
  if (w.psi_tgt) spec.psi_tgt = *w.psi_tgt;
  return setup.model(cfg).with_spec(spec);
}

void add_window_options(CLI::App* app, Window& w) {
  app->add_option("--psi-min", w.psi_min, "Lower PMV bound")->check(CLI::Range(-3.0, 3.0));
  app->add_option("--psi-max", w.psi_max, "Upper PMV bound")->check(CLI::Range(-3.0, 3.0));
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("{}: '{}' is not a number", what, item));
    }
  }
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string scenario_id;
  std::string id = "cli";
  int month = 1;
  double t_inf_c = 10.0;
  double dni = 0.0;
  double dhi = 0.0;
  double beta_deg = 0.0;
  int n_pass = 20;
  double zeta_door = 0.1;
  double zeta_sh = 0.3;
  std::string concept_name = "base";
  std::string rh = "auto";
  Window window;
  bool json = false;
  bool passengers = false;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
  Run run(g, "solve");
  Scenario scn;
  if (!a.scenario_id.empty()) {
    const ScenarioSet set = run.scenarios();
    const auto it = std::find_if(set.begin(), set.end(), [&](const Scenario& s) { return s.id == a.scenario_id; });
    if (it == set.end()) throw DataError(fmt::format("scenario '{}' not found", a.scenario_id));
    scn = *it;
  } else {
    scn.id = a.id;
    scn.month = a.month;
    scn.t_inf = to_kelvin(a.t_inf_c);
    scn.beta = deg_to_rad(a.beta_deg);
    scn.i_dni = scn.beta > 0.0 ? a.dni : 0.0;
    scn.i_dhi = scn.beta > 0.0 ? a.dhi : 0.0;
    scn.n_pass = a.n_pass;
    scn.zeta_door = a.zeta_door;
    scn.zeta_sh = a.zeta_sh;
    validate(scn);
    run.set_scenario_source("command line");
  }

  const ModelSetup& setup = run.setup();
  const ThermalModel model = model_with_window(setup, setup.concept_config(a.concept_name), a.window);

  auto solve_one = [&](SolverKind kind) {
    if (a.window.psi_tgt) {
      const bool on = a.rh == "on" || (a.rh == "auto" && model.config().uses_radiant_heaters());
      if (a.rh == "auto" && model.config().uses_radiant_heaters()) {
        SolveResult off = solve_fixed_pmv(scn, model, false);
        SolveResult rh = solve_fixed_pmv(scn, model, true);
        return rh.p_tot < off.p_tot ? rh : off;
      }
      return solve_fixed_pmv(scn, model, on);
    }
    if (a.rh == "auto") return solve_best(scn, model, kind);
    return solve_window(scn, model, a.rh == "on", kind);
  };

  json results = json::array();
  std::optional<double> first_p;
  for (SolverKind kind : run.solvers()) {
    const SolveResult r = solve_one(kind);
    const auto residuals = balance_residuals(r.state, scn, model.config(), r.rh_used);
    std::cout << format_result(r, residuals);
    if (first_p) {
      const double rel = std::abs(r.p_tot - *first_p) / std::max(*first_p, 1.0);
      std::cout << fmt::format("  relative P_tot difference between solvers: {:.3e}\n", rel);
    }
    first_p = r.p_tot;
    json j = to_json(r);
    j["balance_residuals"] = residuals;
    results.push_back(j);
    if (a.passengers) {
      const Occupancy occ = model.occupancy(scn);
      run.write(fmt::format("passengers_{}.csv", to_string(kind)),
                render([&](std::ostream& o) { write_passengers_csv(r, occ, o); }));
    }
    if (a.window.psi_tgt) break;  // fixed-target solves use the root-finding route only
  }
  if (a.json) run.write("result.json", results.dump(2) + "\n");
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string windows;
  std::string concepts;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  Run run(g, "sweep");
  const ScenarioSet set = run.scenarios();
  const ModelSetup& setup = run.setup();
  const std::vector<double> widths = a.windows.empty() ? setup.run.half_widths : parse_list(a.windows, "--windows");
  if (widths.empty()) throw UsageError("empty window list");

  std::vector<NamedModel> models;
  if (a.concepts.empty()) {
    models = setup.concept_models();
  } else {
    for (const auto& name : split_names(a.concepts)) models.push_back({name, setup.model(setup.concept_config(name))});
  }
  if (models.empty()) throw UsageError("no concepts to sweep");

  json report{{"scenarios", set.size()}, {"half_widths", widths}};
  json curves_json = json::object();
  std::vector<ConceptCurve> curves;
  const auto kinds = run.solvers();
  for (const auto& m : models) {
    std::vector<ParetoPoint> points;
    try {
      points = pareto_sweep(set, m.model, widths, run.batch(kinds.front()));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (kinds.size() > 1) {
      const auto check = pareto_sweep(set, m.model, widths, run.batch(kinds.back()));
      double worst = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        worst = std::max(worst, std::abs(points[i].p_tot - check[i].p_tot) / std::max(points[i].p_tot, 1.0));
      }
      report["solver_agreement"][m.name] = worst;
      std::cerr << fmt::format("{}: largest relative annual P_tot difference between solvers {:.3e}\n", m.name, worst);
    }
    run.write(fmt::format("pareto_{}.csv", m.name), render([&](std::ostream& o) { write_pareto_csv(points, o); }));
    curves_json[m.name] = to_json(points);
    curves.push_back({m.name, std::move(points)});
  }
  run.write("plot_data.csv", render([&](std::ostream& o) { write_plot_data_csv(curves, o); }));
  report["curves"] = curves_json;
  run.write("report.json", report.dump(2) + "\n");
  for (const auto& c : curves) {
    std::cout << c.name << '\n';
    for (const auto& p : c.points) {
      std::cout << fmt::format("  w={:.2f}  P_tot={:9.1f} W  PPD={:6.2f} %\n", p.half_width, p.p_tot, p.ppd);
    }
  }
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------
// sensitivity

struct SensitivityArgs {
  std::string concept_name = "base";
  std::string params;
  std::optional<double> delta;
  Window window;
};

int cmd_sensitivity(const Globals& g, const SensitivityArgs& a) {
  Run run(g, "sensitivity");
  const ScenarioSet set = run.scenarios();
  const ModelSetup& setup = run.setup();
  const ThermalModel model = model_with_window(setup, setup.concept_config(a.concept_name), a.window);
  const std::vector<std::string> params = a.params.empty() ? setup.run.sensitivity_parameters : split_names(a.params);
  const double delta = a.delta.value_or(setup.run.sensitivity_delta);
  std::vector<SensitivityEntry> entries;
  try {
    entries = oat_sensitivity(set, model, params, delta, run.batch(run.solvers().front()));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  run.write("sensitivity.csv", render([&](std::ostream& o) { write_sensitivity_csv(entries, o); }));
  run.write("sensitivity.json", to_json(entries).dump(2) + "\n");
  for (const auto& e : entries) {
    std::cout << fmt::format("{:<16} {:+d}  {:+8.4f} %   [{:+.4f}, {:+.4f}]\n", e.parameter, e.direction,
                             e.rel_change, e.p5, e.p95);
  }
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------
// monthly

struct MonthlyArgs {
  std::string concept_name = "base";
  Window window;
};

int cmd_monthly(const Globals& g, const MonthlyArgs& a) {
  Run run(g, "monthly");
  const ScenarioSet set = run.scenarios();
  const ModelSetup& setup = run.setup();
  const ThermalModel model = model_with_window(setup, setup.concept_config(a.concept_name), a.window);
  const auto results = solve_batch(set.scenarios, model, run.batch(run.solvers().front()));
  const auto months = monthly_summary(results);
  run.write("monthly.csv", render([&](std::ostream& o) { write_monthly_csv(months, o); }));
  run.write("results.csv", render([&](std::ostream& o) { write_results_csv(results, o); }));
  for (const auto& m : months) {
    if (!m.present()) {
      std::cout << fmt::format("{:2d}  (no scenarios)\n", m.month);
      continue;
    }
    std::cout << fmt::format("{:2d}  n={:5d}  P_tot={:9.1f} W  heat {:5.1f} %  cool {:5.1f} %  passive {:5.1f} %\n",
                             m.month, m.count, m.p_tot, 100 * m.frac_heating, 100 * m.frac_cooling,
                             100 * m.frac_passive);
  }
  bool all_months = true;
  for (const auto& m : months) all_months = all_months && m.present();
  if (all_months) {
    const AnnualSummary annual = aggregate_annual(results, set);
    run.write("annual.json", to_json(annual).dump(2) + "\n");
    std::cout << fmt::format("annual mean P_tot {:.1f} W, PPD {:.2f} %\n", annual.p_tot, annual.ppd.value_or(0.0));
  }
  run.finish();
  return kOk;
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  int n = 7500;
  std::string output = "scenarios.csv";
};

int cmd_gen(const Globals& g, const GenArgs& a) {
  Run run(g, "gen");
  if (a.n < 1) throw UsageError("-n must be at least 1");
  const ScenarioSet set = synthesize_dataset(a.n, run.setup().run.seed, run.setup().climate);
  run.set_scenario_source(set.provenance);
  run.write(a.output, render([&](std::ostream& o) { write_scenarios_csv(set, o); }));
  std::cout << fmt::format("{} scenarios written to {}\n", set.size(), (run.out() / a.output).string());
  run.finish();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state bus cabin HVAC simulator and energy/comfort optimizer"};
  app.set_version_flag("--version", CABINTHERM_VERSION);
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "JSON configuration file (default: $CABINTHERM_CONFIG, then built-in)");
  app.add_option("--scenarios", g.scenarios, "Scenario CSV file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Seed for passenger placement and the scenario generator");
  app.add_option("--jobs", g.jobs, "Concurrent scenario solves (0: all cores)");
  app.add_option("--solver", g.solver, "Solution method")->check(CLI::IsMember({"opt", "rootfind", "both"}));

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one scenario and print every heat flow");
  solve_cmd->add_option("--scenario-id", solve.scenario_id, "Take the scenario from --scenarios");
  solve_cmd->add_option("--id", solve.id, "Label of an inline scenario");
  solve_cmd->add_option("--month", solve.month)->check(CLI::Range(1, 12));
  solve_cmd->add_option("--t-inf", solve.t_inf_c, "Ambient temperature, C");
  solve_cmd->add_option("--dni", solve.dni, "Direct normal irradiance, W/m^2");
  solve_cmd->add_option("--dhi", solve.dhi, "Diffuse horizontal irradiance, W/m^2");
  solve_cmd->add_option("--beta", solve.beta_deg, "Solar altitude, degrees");
  solve_cmd->add_option("--n-pass", solve.n_pass, "Passengers");
  solve_cmd->add_option("--zeta-door", solve.zeta_door, "Door-open fraction");
  solve_cmd->add_option("--zeta-sh", solve.zeta_sh, "Shade fraction");
  solve_cmd->add_option("--concept", solve.concept_name, "Concept name from the configuration, or 'base'");
  solve_cmd->add_option("--rh", solve.rh, "Radiant heaters")->check(CLI::IsMember({"auto", "on", "off"}));
  add_window_options(solve_cmd, solve.window);
  solve_cmd->add_option("--psi-tgt", solve.window.psi_tgt, "Fixed PMV target instead of a window")
      ->check(CLI::Range(-3.0, 3.0));
  solve_cmd->add_flag("--json", solve.json, "Also write result.json");
  solve_cmd->add_flag("--passengers", solve.passengers, "Also write per-passenger T_mr/PMV CSV");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Pareto fronts over PMV windows for each concept");
  sweep_cmd->add_option("--windows", sweep.windows, "Comma-separated half-widths (default 0,0.1,...,2)");
  sweep_cmd->add_option("--concepts", sweep.concepts, "Comma-separated concept names (default all)");

  SensitivityArgs sens;
  auto* sens_cmd = app.add_subcommand("sensitivity", "One-at-a-time sensitivity of the annual mean power");
  sens_cmd->add_option("--concept", sens.concept_name, "Concept name, or 'base'");
  sens_cmd->add_option("--params", sens.params, "Comma-separated parameter names");
  sens_cmd->add_option("--delta", sens.delta, "Relative perturbation (default 0.01)")->check(CLI::Range(0.0, 0.5));
  add_window_options(sens_cmd, sens.window);

  MonthlyArgs monthly;
  auto* monthly_cmd = app.add_subcommand("monthly", "Monthly averages of heat, power and operating modes");
  monthly_cmd->add_option("--concept", monthly.concept_name, "Concept name, or 'base'");
  add_window_options(monthly_cmd, monthly.window);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic scenario CSV");
  gen_cmd->add_option("-n", gen.n, "Number of scenarios")->capture_default_str();
  gen_cmd->add_option("--output", gen.output, "File name inside --out")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(g, solve);
    if (*sweep_cmd) return cmd_sweep(g, sweep);
    if (*sens_cmd) return cmd_sensitivity(g, sens);
    if (*monthly_cmd) return cmd_monthly(g, monthly);
    if (*gen_cmd) return cmd_gen(g, gen);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const EvaluationError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
