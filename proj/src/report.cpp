#include "cabintherm/report.hpp"

#include <ostream>

#include <fmt/format.h>

#include "cabintherm/units.hpp"

namespace cabintherm {

using nlohmann::json;

namespace {

std::string num(double v) { return fmt::format("{}", v); }
std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

struct NamedFlow {
  const char* name;
  double value;
};

std::array<NamedFlow, 15> named_flows(const HeatFlows& f) {
  return {{{"Q_pass", f.q_pass},   {"Q_door", f.q_door}, {"Q_sol_cab", f.q_sol_cab}, {"Q_sol_si", f.q_sol_si},
           {"Q_sol_so", f.q_sol_so}, {"Q_r_so", f.q_r_so}, {"Q_r_rh", f.q_r_rh},       {"Q_h_rh", f.q_h_rh},
           {"Q_h_si", f.q_h_si},   {"Q_h_so", f.q_h_so}, {"Q_k", f.q_k},              {"Q_hvac", f.q_hvac},
           {"P_rh", f.p_rh},       {"P_hvac", f.p_hvac}, {"P_tot", f.p_tot}}};
}

}  // namespace

void write_results_csv(std::span<const SolveResult> results, std::ostream& out) {
  out << "id,month,mode,rh_used,solver,T_cab_C,T_rh_C,T_si_C,T_so_C,Q_hp,Q_ac,mean_pmv,ppd";
  for (const auto& f : named_flows(HeatFlows{})) out << ',' << f.name;
  out << '\n';
  for (const auto& r : results) {
    out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", r.scenario_id, r.month, to_string(r.mode),
                       r.rh_used ? 1 : 0, to_string(r.solver), num(to_celsius(r.state.t_cab)),
                       num(to_celsius(r.state.t_rh)), num(to_celsius(r.state.t_si)), num(to_celsius(r.state.t_so)),
                       num(r.q_hp), num(r.q_ac), opt(r.mean_psi), opt(r.ppd));
    for (const auto& f : named_flows(r.flows)) out << ',' << num(f.value);
    out << '\n';
  }
}

void write_monthly_csv(const std::array<MonthlyRow, 12>& months, std::ostream& out) {
  out << "month,count,present,P_hvac,P_rh,P_tot,Q_heat,Q_cool,frac_heating,frac_cooling,frac_passive,ppd\n";
  for (const auto& m : months) {
    if (!m.present()) {
      out << fmt::format("{},0,0,,,,,,,,,\n", m.month);
      continue;
    }
    out << fmt::format("{},{},1,{},{},{},{},{},{},{},{},{}\n", m.month, m.count, num(m.p_hvac), num(m.p_rh),
                       num(m.p_tot), num(m.q_heat), num(m.q_cool), num(m.frac_heating), num(m.frac_cooling),
                       num(m.frac_passive), opt(m.ppd));
  }
}

void write_pareto_csv(std::span<const ParetoPoint> points, std::ostream& out) {
  out << "half_width,ppd,P_tot,P_hvac,P_rh,Q_heat,Q_cool\n";
  for (const auto& p : points) {
    out << fmt::format("{},{},{},{},{},{},{}\n", num(p.half_width), num(p.ppd), num(p.p_tot),
                       num(p.summary.p_hvac), num(p.summary.p_rh), num(p.summary.q_heat), num(p.summary.q_cool));
  }
}

void write_plot_data_csv(std::span<const ConceptCurve> curves, std::ostream& out) {
  out << "concept,half_width,x_ppd,y_P_tot\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << fmt::format("{},{},{},{}\n", c.name, num(p.half_width), num(p.ppd), num(p.p_tot));
    }
  }
}

void write_sensitivity_csv(std::span<const SensitivityEntry> entries, std::ostream& out) {
  out << "parameter,direction,rel_change_pct,p5_pct,p95_pct,P_tot\n";
  for (const auto& e : entries) {
    out << fmt::format("{},{},{},{},{},{}\n", e.parameter, e.direction, num(e.rel_change), num(e.p5), num(e.p95),
                       num(e.p_tot));
  }
}

void write_passengers_csv(const SolveResult& r, const Occupancy& occ, std::ostream& out) {
  out << "index,x,y,view_weight,T_mr_C,pmv\n";
  for (std::size_t i = 0; i < occ.passengers.size(); ++i) {
    const double w = r.rh_used ? occ.weights[i] : 0.0;
    const double t_mr = mean_radiant_temperature(w, r.state.t_si, r.state.t_rh);
    const double psi = i < r.per_passenger_pmv.size() ? r.per_passenger_pmv[i] : 0.0;
    out << fmt::format("{},{},{},{},{},{}\n", i, num(occ.passengers[i].x), num(occ.passengers[i].y), num(w),
                       num(to_celsius(t_mr)), num(psi));
  }
}

json to_json(const SolveResult& r) {
  json flows;
  for (const auto& f : named_flows(r.flows)) flows[f.name] = f.value;
  json j{{"id", r.scenario_id},
         {"month", r.month},
         {"mode", std::string(to_string(r.mode))},
         {"rh_used", r.rh_used},
         {"solver", std::string(to_string(r.solver))},
         {"iterations", r.iterations},
         {"T_cab_C", to_celsius(r.state.t_cab)},
         {"T_rh_C", to_celsius(r.state.t_rh)},
         {"T_si_C", to_celsius(r.state.t_si)},
         {"T_so_C", to_celsius(r.state.t_so)},
         {"Q_hp", r.q_hp},
         {"Q_ac", r.q_ac},
         {"P_tot", r.p_tot},
         {"flows", flows},
         {"per_passenger_pmv", r.per_passenger_pmv}};
  j["mean_pmv"] = r.mean_psi ? json(*r.mean_psi) : json(nullptr);
  j["ppd"] = r.ppd ? json(*r.ppd) : json(nullptr);
  return j;
}

json to_json(const AnnualSummary& a) {
  json months = json::array();
  for (const auto& m : a.months) {
    json row{{"month", m.month}, {"count", m.count}};
    if (m.present()) {
      row.update({{"P_hvac", m.p_hvac},
                  {"P_rh", m.p_rh},
                  {"P_tot", m.p_tot},
                  {"Q_heat", m.q_heat},
                  {"Q_cool", m.q_cool},
                  {"frac_heating", m.frac_heating},
                  {"frac_cooling", m.frac_cooling},
                  {"frac_passive", m.frac_passive}});
      row["ppd"] = m.ppd ? json(*m.ppd) : json(nullptr);
    }
    months.push_back(row);
  }
  json j{{"P_hvac", a.p_hvac}, {"P_rh", a.p_rh}, {"P_tot", a.p_tot},
         {"Q_heat", a.q_heat}, {"Q_cool", a.q_cool}, {"months", months}};
  j["ppd"] = a.ppd ? json(*a.ppd) : json(nullptr);
  return j;
}

json to_json(std::span<const ParetoPoint> points) {
  json arr = json::array();
  for (const auto& p : points) {
    arr.push_back({{"half_width", p.half_width}, {"P_tot", p.p_tot}, {"ppd", p.ppd}, {"annual", to_json(p.summary)}});
  }
  return arr;
}

json to_json(std::span<const SensitivityEntry> entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    arr.push_back({{"parameter", e.parameter},
                   {"direction", e.direction},
                   {"rel_change_pct", e.rel_change},
                   {"p5_pct", e.p5},
                   {"p95_pct", e.p95},
                   {"P_tot", e.p_tot}});
  }
  return arr;
}

std::string format_result(const SolveResult& r, std::span<const double> residuals) {
  std::string s;
  s += fmt::format("scenario {}  (month {})\n", r.scenario_id, r.month);
  s += fmt::format("  mode {}, radiant heaters {}, solver {}, {} iterations\n", to_string(r.mode),
                   r.rh_used ? "on" : "off", to_string(r.solver), r.iterations);
  s += fmt::format("  T_cab {:8.2f} C   T_rh {:8.2f} C   T_si {:8.2f} C   T_so {:8.2f} C\n",
                   to_celsius(r.state.t_cab), to_celsius(r.state.t_rh), to_celsius(r.state.t_si),
                   to_celsius(r.state.t_so));
  s += "  heat flows [W]\n";
  for (const auto& f : named_flows(r.flows)) s += fmt::format("    {:<10} {:12.2f}\n", f.name, f.value);
  if (r.mean_psi) {
    s += fmt::format("  mean PMV {:+.4f}   PPD {:.2f} %   ({} passengers)\n", *r.mean_psi, *r.ppd,
                     r.per_passenger_pmv.size());
  } else {
    s += "  empty cabin: no comfort constraint\n";
  }
  s += "  balance residuals [W]:";
  for (double v : residuals) s += fmt::format(" {:.3e}", v);
  s += "\n";
  return s;
}

}  // namespace cabintherm
