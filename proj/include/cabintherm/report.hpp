#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cabintherm/analysis.hpp"
#include "cabintherm/solver.hpp"

namespace cabintherm {

// Emitters for result tables. Numbers are printed in their shortest exact
// form, so identical results give identical bytes. Temperatures in Celsius.

void write_results_csv(std::span<const SolveResult> results, std::ostream& out);
void write_monthly_csv(const std::array<MonthlyRow, 12>& months, std::ostream& out);
void write_pareto_csv(std::span<const ParetoPoint> points, std::ostream& out);
// Long-form plot data: one row per (concept, window), x = PPD, y = P_tot.
void write_plot_data_csv(std::span<const ConceptCurve> curves, std::ostream& out);
void write_sensitivity_csv(std::span<const SensitivityEntry> entries, std::ostream& out);
// Per-passenger positions, mean radiant temperatures and PMV of one result.
void write_passengers_csv(const SolveResult& result, const Occupancy& occ, std::ostream& out);

nlohmann::json to_json(const SolveResult& r);
nlohmann::json to_json(const AnnualSummary& a);
nlohmann::json to_json(std::span<const ParetoPoint> points);
nlohmann::json to_json(std::span<const SensitivityEntry> entries);

// Human-readable single-scenario report: temperatures, every heat flow, PMV,
// PPD and the balance residuals.
std::string format_result(const SolveResult& r, std::span<const double> residuals);

}  // namespace cabintherm
