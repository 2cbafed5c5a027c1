#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cabintherm/model.hpp"
#include "cabintherm/thermal_model.hpp"

namespace cabintherm {

enum class HvacMode { heating, cooling, passive };
enum class SolverKind { optimization, rootfind };

std::string_view to_string(HvacMode mode);
std::string_view to_string(SolverKind kind);

struct SolveResult {
  std::string scenario_id;
  int month = 0;
  ThermalState state{};
  HeatFlows flows;
  std::vector<double> per_passenger_pmv;
  std::optional<double> mean_psi;  // clamped to [-3, 3]; empty for an empty cabin
  std::optional<double> ppd;       // %, of mean_psi
  double p_tot = 0.0;
  double q_hp = 0.0;  // heating part of q_hvac, W
  double q_ac = 0.0;  // cooling part, W
  HvacMode mode = HvacMode::passive;
  bool rh_used = false;
  SolverKind solver = SolverKind::rootfind;
  int iterations = 0;
};

// Square system: balance rows, panel at its target temperature (rh_on) and
// mean PMV equal to the model's psi_tgt. Throws std::invalid_argument without
// a target and SolverError when Newton fails from every starting point.
SolveResult solve_fixed_pmv(const Scenario& scn, const ThermalModel& model, bool rh_on);
SolveResult solve_fixed_pmv(const Scenario& scn, const ThermalModel& model, double psi_tgt, bool rh_on);

// Passive solve first; if the mean PMV leaves the window, the violated limit
// becomes the target.
SolveResult solve_window_rootfind(const Scenario& scn, const ThermalModel& model, bool rh_on);

// Minimum electric power over heating, cooling and panel power subject to
// the balance and the PMV window (polynomial surrogate inside the optimizer,
// corrected until the exact PMV satisfies the window).
SolveResult solve_window_opt(const Scenario& scn, const ThermalModel& model, bool rh_on);

SolveResult solve_window(const Scenario& scn, const ThermalModel& model, bool rh_on, SolverKind kind);

// Radiant heaters on and off when the configuration has them; the cheaper
// result wins, ties go to off.
SolveResult solve_best(const Scenario& scn, const ThermalModel& model, SolverKind kind = SolverKind::optimization);

}  // namespace cabintherm
