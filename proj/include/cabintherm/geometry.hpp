#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cabintherm {

using Vec3 = Eigen::Vector3d;

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
};

// Axis-aligned rectangle. It radiates to the side of edge_u x edge_v.
class Rect3 {
 public:
  Rect3(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v);

  const Vec3& origin() const { return origin_; }
  const Vec3& edge_u() const { return edge_u_; }
  const Vec3& edge_v() const { return edge_v_; }
  double area() const { return edge_u_.cross(edge_v_).norm(); }

  int normal_axis() const { return normal_axis_; }
  double normal_sign() const { return normal_sign_; }
  double plane_offset() const { return origin_[normal_axis_]; }
  Interval extent(int axis) const;
  Vec3 normal() const;

 private:
  Vec3 origin_;
  Vec3 edge_u_;
  Vec3 edge_v_;
  int normal_axis_ = 2;
  double normal_sign_ = 1.0;
};

// Diffuse view factor F_{a->b} for two parallel rectangles facing each other.
double vf_parallel_rects(const Rect3& a, const Rect3& b);

// F_{a->b} for rectangles in perpendicular planes. Parts of either rectangle
// behind the other's plane do not exchange radiation.
double vf_perpendicular_rects(const Rect3& a, const Rect3& b);

// Dispatches to one of the two above; zero for back-to-back configurations.
double view_factor(const Rect3& a, const Rect3& b);

// Standing passenger as a 0.25 x 0.25 x 1.7 m cuboid on the floor.
struct PassengerCuboid {
  static constexpr double kWidth = 0.25;
  static constexpr double kHeight = 1.7;

  double x = 0.0;  // footprint centre, m along the cabin
  double y = 0.0;  // m across the cabin

  // four side faces then the top face, all facing outward; the floor face
  // does not take part
  std::array<Rect3, 5> faces() const;
};

struct CabinLayout {
  double length = 18.0;  // m
  double width = 2.4;    // m
  double height = 2.3;   // m
  double pitch = 0.5;    // m, placement grid
  std::vector<Rect3> panels;  // radiant heaters on the ceiling, facing down
  std::vector<PassengerCuboid> passengers;

  // Panels of `panel_width` on the ceiling centreline, evenly spaced along the
  // cabin away from the front and rear 1.5 m, totalling `total_area`.
  static CabinLayout with_panel_strip(double total_area, int panel_count = 4,
                                      double panel_width = 0.6);
  // Same strip, replacing the panels of this layout.
  void set_panel_strip(double total_area, int panel_count = 4, double panel_width = 0.6);

  void validate() const;
  double panel_area() const;
  int grid_columns() const;
  int grid_rows() const;
  int grid_capacity() const { return grid_columns() * grid_rows(); }
  PassengerCuboid grid_cell(int index) const;
};

// n distinct cell indices out of [0, capacity), drawn without replacement by a
// partial Fisher-Yates shuffle. Deterministic in seed. Throws
// std::invalid_argument if n exceeds the capacity.
std::vector<int> draw_grid_cells(int n, std::uint64_t seed, int capacity);

// The passengers standing on draw_grid_cells(n, seed, capacity).
std::vector<PassengerCuboid> place_passengers(int n, std::uint64_t seed, const CabinLayout& layout);

// Area-weighted share of the passenger's surface that sees heater panels:
// sum_i A_i F_{i->rh} / sum_i A_i.
double panel_view_weight(const PassengerCuboid& p, const CabinLayout& layout);

double mean_radiant_temperature(const PassengerCuboid& p, const CabinLayout& layout, double t_si,
                                double t_rh);

// Fourth-power mixing with a precomputed panel view weight.
inline double mean_radiant_temperature(double weight, double t_si, double t_rh) {
  const double a = t_si * t_si;
  const double b = t_rh * t_rh;
  const double m4 = (1.0 - weight) * a * a + weight * b * b;
  return std::sqrt(std::sqrt(m4));
}

std::vector<double> cabin_mean_radiant_set(const CabinLayout& layout, double t_si, double t_rh);

}  // namespace cabintherm
