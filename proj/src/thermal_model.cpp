#include "cabintherm/thermal_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"

namespace cabintherm {
namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

bool same_physiology(const ComfortSpec& a, const ComfortSpec& b) {
  return a.v_cab == b.v_cab && a.phi_cab == b.phi_cab && a.met == b.met;
}

}  // namespace

ThermalModel::ThermalModel(BusConfig cfg, ComfortSpec spec, CabinLayout layout, ClothingModel clothing,
                           std::uint64_t seed)
    : cfg_(std::move(cfg)),
      spec_(std::move(spec)),
      layout_(std::move(layout)),
      clothing_(std::move(clothing)),
      seed_(seed) {
  cfg_.validate();
  spec_.validate();
  prepare_geometry();
  surrogate_ = std::make_shared<const PmvSurrogate>(PmvSurrogate::fit_default(spec_));
}

void ThermalModel::prepare_geometry() {
  if (!cfg_.uses_radiant_heaters()) {
    layout_.panels.clear();
  } else if (layout_.panels.empty()) {
    layout_.set_panel_strip(cfg_.a_rh);
  } else {
    const double area = layout_.panel_area();
    if (std::abs(area - cfg_.a_rh) > 1e-6 * cfg_.a_rh) {
      throw ConfigError(fmt::format("panel layout area {:.6g} m^2 does not match A_rh = {:.6g} m^2", area,
                                    cfg_.a_rh));
    }
  }
  try {
    layout_.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  auto weights = std::make_shared<std::vector<double>>(static_cast<std::size_t>(layout_.grid_capacity()), 0.0);
  if (!layout_.panels.empty()) {
    for (int i = 0; i < layout_.grid_capacity(); ++i) {
      (*weights)[i] = panel_view_weight(layout_.grid_cell(i), layout_);
    }
  }
  cell_weights_ = std::move(weights);
}

std::uint64_t ThermalModel::scenario_seed(std::string_view id) const { return splitmix64(seed_ ^ fnv1a(id)); }

Occupancy ThermalModel::occupancy(const Scenario& scn) const {
  Occupancy occ;
  occ.clo = clothing_(scn.t_inf);
  std::vector<int> cells;
  try {
    cells = draw_grid_cells(scn.n_pass, scenario_seed(scn.id), layout_.grid_capacity());
  } catch (const std::invalid_argument& e) {
    throw DataError(fmt::format("scenario '{}': {}", scn.id, e.what()));
  }
  occ.passengers.reserve(cells.size());
  occ.weights.reserve(cells.size());
  for (int c : cells) {
    occ.passengers.push_back(layout_.grid_cell(c));
    const double w = (*cell_weights_)[c];
    occ.weights.push_back(w);
    auto it = std::find(occ.group_weight.begin(), occ.group_weight.end(), w);
    if (it == occ.group_weight.end()) {
      occ.group_weight.push_back(w);
      occ.group_count.push_back(1);
    } else {
      ++occ.group_count[it - occ.group_weight.begin()];
    }
  }
  return occ;
}

ThermalModel ThermalModel::with_window(double psi_min, double psi_max) const {
  ThermalModel m = *this;
  m.spec_.psi_min = psi_min;
  m.spec_.psi_max = psi_max;
  m.spec_.psi_tgt.reset();
  m.spec_.validate();
  return m;
}

ThermalModel ThermalModel::with_spec(const ComfortSpec& spec) const {
  ThermalModel m = *this;
  m.spec_ = spec;
  m.spec_.validate();
  if (!same_physiology(spec_, spec)) {
    m.surrogate_ = std::make_shared<const PmvSurrogate>(PmvSurrogate::fit_default(m.spec_));
  }
  return m;
}

ThermalModel ThermalModel::with_config(const BusConfig& cfg) const {
  ThermalModel m = *this;
  m.cfg_ = cfg;
  m.cfg_.validate();
  if (cfg.uses_radiant_heaters() != cfg_.uses_radiant_heaters() || cfg.a_rh != cfg_.a_rh) {
    if (cfg_.uses_radiant_heaters()) m.layout_.panels.clear();
    m.prepare_geometry();
  }
  return m;
}

ThermalModel ThermalModel::with_clothing(const ClothingModel& clothing) const {
  ThermalModel m = *this;
  m.clothing_ = clothing;
  return m;
}

double occupancy_mean_pmv(const Occupancy& occ, const ComfortSpec& spec, double t_cab, double t_si,
                          double t_rh, bool rh_on) {
  if (occ.empty()) throw std::invalid_argument("mean PMV of an empty cabin");
  if (!rh_on) return pmv(t_cab, t_si, occ.clo, spec);
  double sum = 0.0;
  for (std::size_t g = 0; g < occ.group_weight.size(); ++g) {
    const double t_mr = mean_radiant_temperature(occ.group_weight[g], t_si, t_rh);
    sum += occ.group_count[g] * pmv(t_cab, t_mr, occ.clo, spec);
  }
  return sum / occ.size();
}

std::vector<double> occupancy_pmv(const Occupancy& occ, const ComfortSpec& spec, double t_cab, double t_si,
                                  double t_rh, bool rh_on) {
  std::vector<double> out;
  out.reserve(occ.passengers.size());
  for (double w : occ.weights) {
    const double t_mr = rh_on ? mean_radiant_temperature(w, t_si, t_rh) : t_si;
    out.push_back(pmv(t_cab, t_mr, occ.clo, spec));
  }
  return out;
}

}  // namespace cabintherm
