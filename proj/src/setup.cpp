#include "cabintherm/setup.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "cabintherm/errors.hpp"
#include "cabintherm/units.hpp"

namespace cabintherm {

using nlohmann::json;

namespace {

// Reads keys of one JSON object, rejecting anything it was not asked about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("{} must be an object", path_));
  }
  // Call once every key has been read.
  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(fmt::format("unknown key {}.{}", path_, it.key()));
    }
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }
  std::string where(const std::string& key) const { return path_ + "." + key; }

  void get(const std::string& key, double& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_number()) throw ConfigError(fmt::format("{} must be a number", where(key)));
    v = x.get<double>();
    if (!std::isfinite(v)) throw ConfigError(fmt::format("{} must be finite", where(key)));
  }
  void get(const std::string& key, int& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_number_integer()) throw ConfigError(fmt::format("{} must be an integer", where(key)));
    v = x.get<int>();
  }
  void get(const std::string& key, bool& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_boolean()) throw ConfigError(fmt::format("{} must be true or false", where(key)));
    v = x.get<bool>();
  }
  void get(const std::string& key, std::string& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_string()) throw ConfigError(fmt::format("{} must be a string", where(key)));
    v = x.get<std::string>();
  }
  template <std::size_t N>
  void get(const std::string& key, std::array<double, N>& v) {
    if (!has(key)) return;
    const json& x = j_.at(key);
    if (!x.is_array() || x.size() != N) throw ConfigError(fmt::format("{} must be an array of {} numbers", where(key), N));
    for (std::size_t i = 0; i < N; ++i) {
      if (!x[i].is_number()) throw ConfigError(fmt::format("{}[{}] must be a number", where(key), i));
      v[i] = x[i].get<double>();
    }
  }
  void get_celsius(const std::string& key, double& kelvin) {
    double c = to_celsius(kelvin);
    const bool present = j_.contains(key);
    get(key, c);
    if (present) kelvin = to_kelvin(c);
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

CopCurve parse_cop(const json& j, CopMode mode, const std::string& where) {
  if (j.is_number()) return CopCurve::constant(j.get<double>(), mode);
  if (!j.is_array() || j.empty()) {
    throw ConfigError(fmt::format("{} must be a number or a list of [delta_T, COP] pairs", where));
  }
  std::vector<CopCurve::Breakpoint> pts;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw ConfigError(fmt::format("{} entries must be [delta_T, COP] pairs", where));
    }
    pts.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  try {
    return CopCurve(std::move(pts), mode);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
}

json cop_to_json(const CopCurve& c) {
  json arr = json::array();
  for (const auto& p : c.breakpoints()) arr.push_back({p.delta_t, p.cop});
  return arr;
}

// Applies the vehicle sections present in `j` on top of `cfg`. Panels, if
// given, go to `panels`.
void apply_bus_sections(const std::string& path, BusConfig& cfg, std::vector<Rect3>* panels,
                        Section& parent) {
  if (parent.has("geometry")) {
    Section s(parent.at("geometry"), path + "geometry");
    s.get("h_door", cfg.h_door);
    s.get("w_door_tot", cfg.w_door_tot);
    s.get("a_roof", cfg.a_roof);
    s.get("a_wall", cfg.a_wall);
    s.get("a_body", cfg.a_body);
    s.done();
  }
  if (parent.has("materials")) {
    Section s(parent.at("materials"), path + "materials");
    s.get("alpha_paint", cfg.alpha_paint);
    s.get("tau_win", cfg.tau_win);
    s.get("zeta_roof", cfg.zeta_roof);
    s.get("zeta_win", cfg.zeta_win);
    s.get("zeta_cab", cfg.zeta_cab);
    s.get("k_body", cfg.k_body);
    s.get("sigma", cfg.sigma);
    s.done();
  }
  if (parent.has("convection")) {
    Section s(parent.at("convection"), path + "convection");
    s.get("h_in", cfg.h_in);
    s.get("h_out", cfg.h_out);
    s.get("h_rh", cfg.h_rh);
    s.get("c_d", cfg.c_d);
    s.get("rho_inf", cfg.rho_inf);
    s.get("c_p_a", cfg.c_p_a);
    s.get("g", cfg.g);
    s.get("door_scale", cfg.door_scale);
    s.done();
  }
  if (parent.has("hvac")) {
    Section s(parent.at("hvac"), path + "hvac");
    if (s.has("cop_heating")) cfg.cop_heating = parse_cop(s.at("cop_heating"), CopMode::heating, s.where("cop_heating"));
    if (s.has("cop_cooling")) cfg.cop_cooling = parse_cop(s.at("cop_cooling"), CopMode::cooling, s.where("cop_cooling"));
    s.done();
  }
  if (parent.has("radiant_heaters")) {
    Section s(parent.at("radiant_heaters"), path + "radiant_heaters");
    s.get("enabled", cfg.rh_enabled);
    s.get("area", cfg.a_rh);
    s.get_celsius("t_target_c", cfg.t_rh_tgt);
    if (s.has("panels")) {
      if (!panels) throw ConfigError(fmt::format("{} may not define panels", s.where("panels")));
      const json& arr = s.at("panels");
      if (!arr.is_array()) throw ConfigError(fmt::format("{} must be a list", s.where("panels")));
      panels->clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Section p(arr[i], fmt::format("{}[{}]", s.where("panels"), i));
        double x = 0, y = 0, len = 0, w = 0;
        for (const char* k : {"x", "y", "length", "width"}) {
          if (!p.has(k)) throw ConfigError(fmt::format("{} needs x, y, length and width", p.where(k)));
        }
        p.get("x", x);
        p.get("y", y);
        p.get("length", len);
        p.get("width", w);
        if (!(len > 0.0 && w > 0.0)) throw ConfigError(fmt::format("{}: panel size must be positive", p.where("length")));
        panels->emplace_back(Vec3(x, y, 0.0), Vec3(0.0, w, 0.0), Vec3(len, 0.0, 0.0));
        p.done();
      }
    }
    s.done();
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Concept> default_concepts(const BusConfig& base) {
  BusConfig ptc = base;
  ptc.cop_heating = CopCurve::constant(1.0, CopMode::heating);
  ptc.rh_enabled = false;
  ptc.a_rh = 0.0;
  BusConfig hp = base;
  hp.cop_heating = CopCurve::default_heating();
  hp.rh_enabled = false;
  hp.a_rh = 0.0;
  BusConfig ptc_rh = ptc;
  ptc_rh.rh_enabled = true;
  ptc_rh.a_rh = 4.0;
  ptc_rh.t_rh_tgt = to_kelvin(90.0);
  BusConfig hp_rh = hp;
  hp_rh.rh_enabled = true;
  hp_rh.a_rh = 4.0;
  hp_rh.t_rh_tgt = to_kelvin(90.0);
  return {{"PTC-AC", ptc}, {"HP-AC", hp}, {"PTC-AC+RH", ptc_rh}, {"HP-AC+RH", hp_rh}};
}

ThermalModel ModelSetup::model() const { return model(bus); }

ThermalModel ModelSetup::model(const BusConfig& cfg) const {
  CabinLayout layout = cabin;
  // custom panels belong to the base area; other areas get the default strip
  if (!layout.panels.empty() && std::abs(layout.panel_area() - cfg.a_rh) > 1e-6 * std::max(cfg.a_rh, 1.0)) {
    layout.panels.clear();
  }
  return ThermalModel(cfg, comfort, layout, clothing, run.seed);
}

const BusConfig& ModelSetup::concept_config(const std::string& name) const {
  if (name == "base") return bus;
  for (const auto& c : concepts) {
    if (c.name == name) return c.config;
  }
  std::vector<std::string> names{"base"};
  for (const auto& c : concepts) names.push_back(c.name);
  throw ConfigError(fmt::format("unknown concept '{}' (known: {})", name, fmt::join(names, ", ")));
}

std::vector<NamedModel> ModelSetup::concept_models() const {
  std::vector<NamedModel> out;
  for (const auto& c : concepts) out.push_back({c.name, model(c.config)});
  return out;
}

ModelSetup setup_from_json_text(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }
  ModelSetup out;
  std::vector<Rect3> panels;
  try {
    Section top(root, source);
    apply_bus_sections("", out.bus, &panels, top);

    if (top.has("cabin")) {
      Section s(top.at("cabin"), "cabin");
      s.get("length", out.cabin.length);
      s.get("width", out.cabin.width);
      s.get("height", out.cabin.height);
      s.get("pitch", out.cabin.pitch);
      s.get("q_met_per_pass", out.bus.q_met_per_pass);
      s.done();
    }
    for (auto& p : panels) {
      // panels are given in plan; they sit on the ceiling facing down
      p = Rect3(Vec3(p.origin().x(), p.origin().y(), out.cabin.height), p.edge_u(), p.edge_v());
    }
    out.cabin.panels = panels;

    if (top.has("comfort")) {
      Section s(top.at("comfort"), "comfort");
      s.get("v_cab", out.comfort.v_cab);
      s.get("phi_cab", out.comfort.phi_cab);
      s.get("met", out.comfort.met);
      s.get("psi_min", out.comfort.psi_min);
      s.get("psi_max", out.comfort.psi_max);
      if (s.has("psi_tgt") && !s.at("psi_tgt").is_null()) {
        double t = 0.0;
        s.get("psi_tgt", t);
        out.comfort.psi_tgt = t;
      }
      s.done();
    }
    if (top.has("clothing")) {
      Section s(top.at("clothing"), "clothing");
      std::array<double, 4> coef = out.clothing.coefficients();
      double floor = out.clothing.floor();
      double scale = out.clothing.scale();
      s.get("coefficients", coef);
      s.get("floor", floor);
      s.get("scale", scale);
      out.clothing = ClothingModel(coef, floor, scale);
      s.done();
    }
    if (top.has("climate_profile")) {
      Section s(top.at("climate_profile"), "climate_profile");
      ClimateProfile& p = out.climate;
      s.get("name", p.name);
      s.get("latitude_deg", p.latitude_deg);
      s.get("longitude_deg", p.longitude_deg);
      s.get("year", p.year);
      s.get("utc_offset_h", p.utc_offset_h);
      s.get("first_hour", p.first_hour);
      s.get("last_hour", p.last_hour);
      s.get("month_weight", p.month_weight);
      s.get("t_mean_c", p.t_mean_c);
      s.get("t_std_c", p.t_std_c);
      s.get("diurnal_amplitude_c", p.diurnal_amplitude_c);
      s.get("clearness_mean", p.clearness_mean);
      s.get("clearness_concentration", p.clearness_concentration);
      s.get("passengers_mean", p.passengers_mean);
      s.get("passengers_shape", p.passengers_shape);
      s.get("passengers_max", p.passengers_max);
      s.get("door_max", p.door_max);
      s.get("door_a", p.door_a);
      s.get("door_b", p.door_b);
      s.get("zeta_sh", p.zeta_sh);
      p.validate();
      s.done();
    }
    if (top.has("run")) {
      Section s(top.at("run"), "run");
      RunSettings& r = out.run;
      if (s.has("seed")) {
        const json& v = s.at("seed");
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
          throw ConfigError("run.seed must be a non-negative integer");
        }
        r.seed = v.get<std::uint64_t>();
      }
      s.get("jobs", r.jobs);
      s.get("solver", r.solver);
      if (s.has("scenarios")) {
        std::string path;
        s.get("scenarios", path);
        r.scenarios = path;
      }
      if (s.has("half_widths")) {
        const json& v = s.at("half_widths");
        if (!v.is_array()) throw ConfigError("run.half_widths must be a list of numbers");
        r.half_widths.clear();
        for (const auto& w : v) {
          if (!w.is_number()) throw ConfigError("run.half_widths must be a list of numbers");
          r.half_widths.push_back(w.get<double>());
        }
      }
      if (s.has("sensitivity_parameters")) {
        const json& v = s.at("sensitivity_parameters");
        if (!v.is_array()) throw ConfigError("run.sensitivity_parameters must be a list of names");
        r.sensitivity_parameters.clear();
        for (const auto& w : v) {
          if (!w.is_string()) throw ConfigError("run.sensitivity_parameters must be a list of names");
          r.sensitivity_parameters.push_back(w.get<std::string>());
        }
      }
      s.get("sensitivity_delta", r.sensitivity_delta);
      if (r.solver != "opt" && r.solver != "rootfind" && r.solver != "both") {
        throw ConfigError("run.solver must be opt, rootfind or both");
      }
      s.done();
    }

    if (top.has("concepts")) {
      const json& arr = top.at("concepts");
      if (!arr.is_array()) throw ConfigError("concepts must be a list");
      std::set<std::string> names;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = fmt::format("concepts[{}].", i);
        Section s(arr[i], fmt::format("concepts[{}]", i));
        Concept c;
        if (!s.has("name")) throw ConfigError(path + "name is required");
        s.get("name", c.name);
        if (c.name.empty() || c.name == "base" || !names.insert(c.name).second) {
          throw ConfigError(fmt::format("{}name '{}' is empty, reserved or repeated", path, c.name));
        }
        c.config = out.bus;
        apply_bus_sections(path, c.config, nullptr, s);
        c.config.validate();
        out.concepts.push_back(std::move(c));
        s.done();
      }
    } else {
      out.concepts = default_concepts(out.bus);
    }
    top.done();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", source, e.what()));
  }

  out.bus.validate();
  out.comfort.validate();
  out.cabin.validate();
  return out;
}

ModelSetup load_setup(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open configuration file {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return setup_from_json_text(buf.str(), path.string());
}

namespace {

json bus_sections(const BusConfig& b) {
  json j;
  j["geometry"] = {{"h_door", b.h_door}, {"w_door_tot", b.w_door_tot}, {"a_roof", b.a_roof},
                   {"a_wall", b.a_wall}, {"a_body", b.a_body}};
  j["materials"] = {{"alpha_paint", b.alpha_paint}, {"tau_win", b.tau_win}, {"zeta_roof", b.zeta_roof},
                    {"zeta_win", b.zeta_win},       {"zeta_cab", b.zeta_cab}, {"k_body", b.k_body},
                    {"sigma", b.sigma}};
  j["convection"] = {{"h_in", b.h_in}, {"h_out", b.h_out}, {"h_rh", b.h_rh}, {"c_d", b.c_d},
                     {"rho_inf", b.rho_inf}, {"c_p_a", b.c_p_a}, {"g", b.g}, {"door_scale", b.door_scale}};
  j["hvac"] = {{"cop_heating", cop_to_json(b.cop_heating)}, {"cop_cooling", cop_to_json(b.cop_cooling)}};
  j["radiant_heaters"] = {{"enabled", b.rh_enabled}, {"area", b.a_rh}, {"t_target_c", to_celsius(b.t_rh_tgt)}};
  return j;
}

}  // namespace

std::string setup_to_json_text(const ModelSetup& s) {
  const BusConfig& b = s.bus;
  json j = bus_sections(b);
  if (!s.cabin.panels.empty()) {
    json panels = json::array();
    for (const auto& p : s.cabin.panels) {
      const Interval x = p.extent(0);
      const Interval y = p.extent(1);
      panels.push_back({{"x", x.lo}, {"y", y.lo}, {"length", x.length()}, {"width", y.length()}});
    }
    j["radiant_heaters"]["panels"] = panels;
  }
  j["cabin"] = {{"length", s.cabin.length}, {"width", s.cabin.width}, {"height", s.cabin.height},
                {"pitch", s.cabin.pitch}, {"q_met_per_pass", b.q_met_per_pass}};
  j["comfort"] = {{"v_cab", s.comfort.v_cab}, {"phi_cab", s.comfort.phi_cab}, {"met", s.comfort.met},
                  {"psi_min", s.comfort.psi_min}, {"psi_max", s.comfort.psi_max}};
  if (s.comfort.psi_tgt) j["comfort"]["psi_tgt"] = *s.comfort.psi_tgt;
  j["clothing"] = {{"coefficients", s.clothing.coefficients()}, {"floor", s.clothing.floor()},
                   {"scale", s.clothing.scale()}};
  const ClimateProfile& p = s.climate;
  j["climate_profile"] = {{"name", p.name},
                          {"latitude_deg", p.latitude_deg},
                          {"longitude_deg", p.longitude_deg},
                          {"year", p.year},
                          {"utc_offset_h", p.utc_offset_h},
                          {"first_hour", p.first_hour},
                          {"last_hour", p.last_hour},
                          {"month_weight", p.month_weight},
                          {"t_mean_c", p.t_mean_c},
                          {"t_std_c", p.t_std_c},
                          {"diurnal_amplitude_c", p.diurnal_amplitude_c},
                          {"clearness_mean", p.clearness_mean},
                          {"clearness_concentration", p.clearness_concentration},
                          {"passengers_mean", p.passengers_mean},
                          {"passengers_shape", p.passengers_shape},
                          {"passengers_max", p.passengers_max},
                          {"door_max", p.door_max},
                          {"door_a", p.door_a},
                          {"door_b", p.door_b},
                          {"zeta_sh", p.zeta_sh}};
  json concepts = json::array();
  for (const auto& c : s.concepts) {
    json cj = bus_sections(c.config);
    cj["name"] = c.name;
    concepts.push_back(cj);
  }
  j["concepts"] = concepts;
  j["run"] = {{"seed", s.run.seed},
              {"jobs", s.run.jobs},
              {"solver", s.run.solver},
              {"half_widths", s.run.half_widths},
              {"sensitivity_parameters", s.run.sensitivity_parameters},
              {"sensitivity_delta", s.run.sensitivity_delta}};
  if (s.run.scenarios) j["run"]["scenarios"] = *s.run.scenarios;
  return j.dump(2) + "\n";
}

}  // namespace cabintherm
