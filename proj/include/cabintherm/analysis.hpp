#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cabintherm/batch.hpp"
#include "cabintherm/scenario.hpp"
#include "cabintherm/solver.hpp"

namespace cabintherm {

struct MonthlyRow {
  int month = 0;  // 1..12
  int count = 0;  // 0: no scenarios, every other field is meaningless
  double p_hvac = 0.0;
  double p_rh = 0.0;
  double p_tot = 0.0;
  double q_heat = 0.0;  // mean heating heat flow, W
  double q_cool = 0.0;  // mean cooling heat flow, W (positive)
  double frac_heating = 0.0;
  double frac_cooling = 0.0;
  double frac_passive = 0.0;
  std::optional<double> ppd;  // mean over occupied scenarios
  bool present() const { return count > 0; }
};

struct AnnualSummary {
  std::array<MonthlyRow, 12> months{};
  // unweighted means of the twelve monthly means
  double p_hvac = 0.0;
  double p_rh = 0.0;
  double p_tot = 0.0;
  double q_heat = 0.0;
  double q_cool = 0.0;
  std::optional<double> ppd;
};

// Per-month means; months without scenarios are left with count 0.
std::array<MonthlyRow, 12> monthly_summary(std::span<const SolveResult> results);

// Month-first averaging. `results` must cover exactly the ids of `scenarios`;
// the month of each result is taken from its scenario. Throws DataError on a
// mismatch or when a month has no scenarios.
AnnualSummary aggregate_annual(std::span<const SolveResult> results, const ScenarioSet& scenarios);

struct ParetoPoint {
  double half_width = 0.0;
  double p_tot = 0.0;  // annual mean, W
  double ppd = 0.0;    // annual mean, %
  AnnualSummary summary;
};

// Sweep of symmetric PMV windows [-w, w]; widths must ascend within [0, 2].
std::vector<ParetoPoint> pareto_sweep(const ScenarioSet& set, const ThermalModel& model,
                                      std::span<const double> half_widths, const BatchOptions& options = {});

struct NamedModel {
  std::string name;
  ThermalModel model;
};

struct ConceptCurve {
  std::string name;
  std::vector<ParetoPoint> points;
};

std::vector<ConceptCurve> compare_concepts(const ScenarioSet& set, std::span<const NamedModel> concepts,
                                           std::span<const double> half_widths,
                                           const BatchOptions& options = {});

// 0.0, 0.1, ..., 2.0
std::vector<double> default_half_widths();

struct SensitivityEntry {
  std::string parameter;  // "baseline" for the reference run
  int direction = 0;      // +1, -1, or 0 for the baseline
  double rel_change = 0.0;  // of the annual mean P_tot, %
  double p5 = 0.0;          // per-scenario relative change percentiles, %
  double p95 = 0.0;
  double p_tot = 0.0;       // annual mean P_tot of this run, W
};

// Parameter names understood by oat_sensitivity.
std::vector<std::string> sensitivity_parameters();
std::vector<std::string> default_sensitivity_parameters();

// The model with one named parameter multiplied by `factor`. COP curves scale
// every breakpoint; the clothing scale acts before the clothing floor;
// q_met_per_pass also scales the metabolic rate of the comfort model.
// Throws std::invalid_argument for unknown names.
ThermalModel scale_parameter(const ThermalModel& model, const std::string& name, double factor);

std::vector<SensitivityEntry> oat_sensitivity(const ScenarioSet& set, const ThermalModel& model,
                                              std::span<const std::string> parameters, double delta = 0.01,
                                              const BatchOptions& options = {});

// Linear-interpolation quantile, q in [0, 1]. Throws on empty input.
double percentile(std::vector<double> values, double q);

}  // namespace cabintherm
