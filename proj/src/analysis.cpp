#include "cabintherm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"

namespace cabintherm {

namespace {

constexpr const char* kMonthNames[] = {"January", "February", "March",     "April",   "May",      "June",
                                       "July",    "August",   "September", "October", "November", "December"};

struct MonthAccumulator {
  int count = 0;
  double p_hvac = 0, p_rh = 0, p_tot = 0, q_heat = 0, q_cool = 0;
  int heating = 0, cooling = 0, passive = 0;
  int occupied = 0;
  double ppd = 0;

  void add(const SolveResult& r) {
    ++count;
    p_hvac += r.flows.p_hvac;
    p_rh += r.flows.p_rh;
    p_tot += r.p_tot;
    q_heat += r.q_hp;
    q_cool += r.q_ac;
    switch (r.mode) {
      case HvacMode::heating: ++heating; break;
      case HvacMode::cooling: ++cooling; break;
      case HvacMode::passive: ++passive; break;
    }
    if (r.ppd) {
      ++occupied;
      ppd += *r.ppd;
    }
  }

  MonthlyRow row(int month) const {
    MonthlyRow m;
    m.month = month;
    m.count = count;
    if (count == 0) return m;
    const double n = count;
    m.p_hvac = p_hvac / n;
    m.p_rh = p_rh / n;
    m.p_tot = p_tot / n;
    m.q_heat = q_heat / n;
    m.q_cool = q_cool / n;
    m.frac_heating = heating / n;
    m.frac_cooling = cooling / n;
    m.frac_passive = passive / n;
    if (occupied > 0) m.ppd = ppd / occupied;
    return m;
  }
};

}  // namespace

std::array<MonthlyRow, 12> monthly_summary(std::span<const SolveResult> results) {
  std::array<MonthAccumulator, 12> acc{};
  for (const auto& r : results) {
    if (r.month < 1 || r.month > 12) {
      throw DataError(fmt::format("result '{}' has month {}", r.scenario_id, r.month));
    }
    acc[r.month - 1].add(r);
  }
  std::array<MonthlyRow, 12> out{};
  for (int m = 0; m < 12; ++m) out[m] = acc[m].row(m + 1);
  return out;
}

AnnualSummary aggregate_annual(std::span<const SolveResult> results, const ScenarioSet& scenarios) {
  std::map<std::string_view, int> month_of;
  for (const auto& s : scenarios) month_of.emplace(s.id, s.month);
  if (month_of.size() != results.size()) {
    throw DataError(fmt::format("{} results for {} scenarios", results.size(), month_of.size()));
  }
  std::array<MonthAccumulator, 12> acc{};
  std::map<std::string_view, int> seen;
  for (const auto& r : results) {
    const auto it = month_of.find(r.scenario_id);
    if (it == month_of.end()) throw DataError(fmt::format("result '{}' has no scenario", r.scenario_id));
    if (++seen[r.scenario_id] > 1) throw DataError(fmt::format("duplicate result for '{}'", r.scenario_id));
    acc[it->second - 1].add(r);
  }

  AnnualSummary a;
  double ppd_sum = 0.0;
  int ppd_months = 0;
  for (int m = 0; m < 12; ++m) {
    if (acc[m].count == 0) {
      throw DataError(fmt::format("no scenarios for {}; annual averages need every month", kMonthNames[m]));
    }
    a.months[m] = acc[m].row(m + 1);
    const MonthlyRow& r = a.months[m];
    a.p_hvac += r.p_hvac / 12.0;
    a.p_rh += r.p_rh / 12.0;
    a.p_tot += r.p_tot / 12.0;
    a.q_heat += r.q_heat / 12.0;
    a.q_cool += r.q_cool / 12.0;
    if (r.ppd) {
      ppd_sum += *r.ppd;
      ++ppd_months;
    }
  }
  if (ppd_months > 0) a.ppd = ppd_sum / ppd_months;
  return a;
}

std::vector<double> default_half_widths() {
  std::vector<double> w;
  for (int i = 0; i <= 20; ++i) w.push_back(i / 10.0);
  return w;
}

std::vector<ParetoPoint> pareto_sweep(const ScenarioSet& set, const ThermalModel& model,
                                      std::span<const double> half_widths, const BatchOptions& options) {
  if (half_widths.empty()) throw std::invalid_argument("no PMV window half-widths given");
  for (std::size_t i = 0; i < half_widths.size(); ++i) {
    const double w = half_widths[i];
    if (!(w >= 0.0 && w <= 2.0)) throw std::invalid_argument(fmt::format("half-width {} outside [0, 2]", w));
    if (i > 0 && !(w > half_widths[i - 1])) throw std::invalid_argument("half-widths must be strictly ascending");
  }
  std::vector<ParetoPoint> out;
  for (double w : half_widths) {
    const ThermalModel m = model.with_window(-w, w);
    const auto results = solve_batch(set.scenarios, m, options);
    ParetoPoint p;
    p.half_width = w;
    p.summary = aggregate_annual(results, set);
    p.p_tot = p.summary.p_tot;
    p.ppd = p.summary.ppd.value_or(0.0);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ConceptCurve> compare_concepts(const ScenarioSet& set, std::span<const NamedModel> concepts,
                                           std::span<const double> half_widths, const BatchOptions& options) {
  std::vector<ConceptCurve> out;
  for (const auto& c : concepts) out.push_back({c.name, pareto_sweep(set, c.model, half_widths, options)});
  return out;
}

// ---------------------------------------------------------------------------
// sensitivity

std::vector<std::string> sensitivity_parameters() {
  return {"q_met_per_pass", "clothing", "gamma_hp", "gamma_ac", "k_body", "door_scale",
          "tau_win",        "alpha_paint", "h_out", "zeta_win", "h_in"};
}

std::vector<std::string> default_sensitivity_parameters() {
  return {"q_met_per_pass", "clothing", "gamma_hp", "gamma_ac", "k_body",
          "door_scale",     "tau_win",  "alpha_paint", "h_out", "zeta_win"};
}

ThermalModel scale_parameter(const ThermalModel& model, const std::string& name, double f) {
  BusConfig cfg = model.config();
  if (name == "q_met_per_pass") {
    cfg.q_met_per_pass *= f;
    ComfortSpec spec = model.spec();
    spec.met *= f;
    return model.with_config(cfg).with_spec(spec);
  }
  if (name == "clothing") return model.with_clothing(model.clothing().scaled(f));
  if (name == "gamma_hp") cfg.cop_heating = cfg.cop_heating.scaled(f);
  else if (name == "gamma_ac") cfg.cop_cooling = cfg.cop_cooling.scaled(f);
  else if (name == "k_body") cfg.k_body *= f;
  else if (name == "door_scale") cfg.door_scale *= f;
  else if (name == "tau_win") cfg.tau_win *= f;
  else if (name == "alpha_paint") cfg.alpha_paint *= f;
  else if (name == "h_out") cfg.h_out *= f;
  else if (name == "zeta_win") cfg.zeta_win *= f;
  else if (name == "h_in") cfg.h_in *= f;
  else throw std::invalid_argument(fmt::format("unknown sensitivity parameter '{}'", name));
  return model.with_config(cfg);
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<SensitivityEntry> oat_sensitivity(const ScenarioSet& set, const ThermalModel& model,
                                              std::span<const std::string> parameters, double delta,
                                              const BatchOptions& options) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0, 1)");
  const auto base = solve_batch(set.scenarios, model, options);
  const double base_annual = aggregate_annual(base, set).p_tot;

  std::vector<SensitivityEntry> out;
  out.push_back({"baseline", 0, 0.0, 0.0, 0.0, base_annual});
  for (const auto& name : parameters) {
    for (int dir : {+1, -1}) {
      const ThermalModel m = scale_parameter(model, name, 1.0 + dir * delta);
      const auto res = solve_batch(set.scenarios, m, options);
      SensitivityEntry e;
      e.parameter = name;
      e.direction = dir;
      e.p_tot = aggregate_annual(res, set).p_tot;
      e.rel_change = base_annual > 0.0 ? 100.0 * (e.p_tot - base_annual) / base_annual : 0.0;
      std::vector<double> rel(res.size());
      for (std::size_t i = 0; i < res.size(); ++i) {
        rel[i] = 100.0 * (res[i].p_tot - base[i].p_tot) / std::max(base[i].p_tot, 1.0);
      }
      e.p5 = percentile(rel, 0.05);
      e.p95 = percentile(rel, 0.95);
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace cabintherm
