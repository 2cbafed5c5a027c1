#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "cabintherm/bus_config.hpp"
#include "cabintherm/comfort.hpp"
#include "cabintherm/geometry.hpp"
#include "cabintherm/model.hpp"

namespace cabintherm {

// Passengers of one scenario as the comfort constraint sees them.
struct Occupancy {
  double clo = 0.0;
  std::vector<PassengerCuboid> passengers;
  std::vector<double> weights;  // panel view weight per passenger

  // distinct weights with multiplicities; mean PMV only needs these
  std::vector<double> group_weight;
  std::vector<int> group_count;

  int size() const { return static_cast<int>(passengers.size()); }
  bool empty() const { return passengers.empty(); }
};

// Everything a solve needs besides the scenario: vehicle, comfort window,
// cabin layout, clothing curve, placement seed and the fitted PMV surrogate.
// Immutable once built and safe to share between threads.
class ThermalModel {
 public:
  // An empty panel list in `layout` is filled with the default ceiling strip
  // when the configuration uses radiant heaters. Throws ConfigError.
  ThermalModel(BusConfig cfg, ComfortSpec spec, CabinLayout layout = {}, ClothingModel clothing = {},
               std::uint64_t seed = 1);

  const BusConfig& config() const { return cfg_; }
  const ComfortSpec& spec() const { return spec_; }
  const CabinLayout& layout() const { return layout_; }
  const ClothingModel& clothing() const { return clothing_; }
  const PmvSurrogate& surrogate() const { return *surrogate_; }
  std::uint64_t seed() const { return seed_; }

  // Placement seed of one scenario: depends on the global seed and the
  // scenario id only, so results do not depend on scenario order.
  std::uint64_t scenario_seed(std::string_view id) const;

  Occupancy occupancy(const Scenario& scn) const;

  // Copies sharing whatever does not change. The surrogate is refitted only
  // when air speed, humidity or metabolic rate change.
  ThermalModel with_window(double psi_min, double psi_max) const;
  ThermalModel with_spec(const ComfortSpec& spec) const;
  ThermalModel with_config(const BusConfig& cfg) const;
  ThermalModel with_clothing(const ClothingModel& clothing) const;

 private:
  void prepare_geometry();

  BusConfig cfg_;
  ComfortSpec spec_;
  CabinLayout layout_;
  ClothingModel clothing_;
  std::uint64_t seed_;
  std::shared_ptr<const PmvSurrogate> surrogate_;
  std::shared_ptr<const std::vector<double>> cell_weights_;
};

// Exact mean PMV over the occupancy for the given temperatures. Without
// radiant heaters every passenger sees the inner shell only.
double occupancy_mean_pmv(const Occupancy& occ, const ComfortSpec& spec, double t_cab, double t_si,
                          double t_rh, bool rh_on);

std::vector<double> occupancy_pmv(const Occupancy& occ, const ComfortSpec& spec, double t_cab,
                                  double t_si, double t_rh, bool rh_on);

}  // namespace cabintherm
