#include "cabintherm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "cabintherm/errors.hpp"
#include "cabintherm/units.hpp"

namespace cabintherm {
namespace {

int single_axis(const Vec3& v) {
  int axis = -1;
  for (int k = 0; k < 3; ++k) {
    if (v[k] != 0.0) {
      if (axis >= 0) return -1;
      axis = k;
    }
  }
  return axis;
}

// Kernels of the closed-form double area integrals for rectangles with
// parallel boundaries. Summed with alternating signs over the corner
// coordinates they give A_1 F_{1->2}.
double parallel_kernel(double x, double y, double z) {
  double r = 0.0;
  const double a = std::hypot(y, z);
  const double b = std::hypot(x, z);
  if (a > 0.0) r += x * a * std::atan(x / a);
  if (b > 0.0) r += y * b * std::atan(y / b);
  const double q = x * x + y * y + z * z;
  if (q > 0.0 && z != 0.0) r -= 0.5 * z * z * std::log(q);
  return r / (2.0 * kPi);
}

// Rectangle 1 in the plane z=0 spanning (x, y); rectangle 2 in the plane x=0
// spanning (xi along y, eta along z).
double perpendicular_kernel(double x, double y, double eta, double xi) {
  const double d = y - xi;
  const double c = x * x + eta * eta;
  double r = 0.0;
  if (c > 0.0) {
    const double sc = std::sqrt(c);
    r += d * sc * std::atan(d / sc);
  }
  const double q = c + d * d;
  if (q > 0.0) r -= 0.25 * (c - d * d) * std::log(q);
  return r / (2.0 * kPi);
}

// Index of the in-plane axes of a rectangle with normal axis n.
std::pair<int, int> in_plane_axes(int n) {
  if (n == 0) return {1, 2};
  if (n == 1) return {0, 2};
  return {0, 1};
}

}  // namespace

Rect3::Rect3(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v)
    : origin_(origin), edge_u_(edge_u), edge_v_(edge_v) {
  const int au = single_axis(edge_u_);
  const int av = single_axis(edge_v_);
  if (au < 0 || av < 0) throw std::invalid_argument("Rect3 edges must be non-zero and axis-aligned");
  if (au == av) throw std::invalid_argument("Rect3 edges must be orthogonal");
  const Vec3 n = edge_u_.cross(edge_v_);
  normal_axis_ = 3 - au - av;
  normal_sign_ = n[normal_axis_] > 0.0 ? 1.0 : -1.0;
}

Interval Rect3::extent(int axis) const {
  const double a = origin_[axis];
  const double b = origin_[axis] + edge_u_[axis] + edge_v_[axis];
  return {std::min(a, b), std::max(a, b)};
}

Vec3 Rect3::normal() const {
  Vec3 n = Vec3::Zero();
  n[normal_axis_] = normal_sign_;
  return n;
}

double vf_parallel_rects(const Rect3& a, const Rect3& b) {
  const int n = a.normal_axis();
  if (b.normal_axis() != n) throw std::invalid_argument("vf_parallel_rects: rectangles are not parallel");
  const double gap = (b.plane_offset() - a.plane_offset()) * a.normal_sign();
  // they must face each other across a positive gap
  if (!(gap > 0.0) || a.normal_sign() == b.normal_sign()) return 0.0;

  const auto [u, v] = in_plane_axes(n);
  const Interval ax = a.extent(u), ay = a.extent(v);
  const Interval bx = b.extent(u), by = b.extent(v);
  const double xs[2] = {ax.lo, ax.hi}, ys[2] = {ay.lo, ay.hi};
  const double xis[2] = {bx.lo, bx.hi}, etas[2] = {by.lo, by.hi};
  double sum = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double sign = ((i + j + k + l) % 2 == 0) ? 1.0 : -1.0;
          sum += sign * parallel_kernel(xs[i] - xis[l], ys[j] - etas[k], gap);
        }
  return std::clamp(sum / a.area(), 0.0, 1.0);
}

double vf_perpendicular_rects(const Rect3& a, const Rect3& b) {
  const int na = a.normal_axis();
  const int nb = b.normal_axis();
  if (na == nb) throw std::invalid_argument("vf_perpendicular_rects: rectangles are parallel");
  const int common = 3 - na - nb;

  // Local frame: z' along a's normal from a's plane, x' along b's normal
  // from b's plane, y' the shared direction.
  const double sa = a.normal_sign();
  const double sb = b.normal_sign();
  auto to_local = [](Interval w, double plane, double sign) {
    const double p = sign * (w.lo - plane);
    const double q = sign * (w.hi - plane);
    return Interval{std::min(p, q), std::max(p, q)};
  };
  Interval ax = to_local(a.extent(nb), b.plane_offset(), sb);  // a's extent across b's normal
  Interval bz = to_local(b.extent(na), a.plane_offset(), sa);  // b's extent across a's normal
  const Interval ay = a.extent(common);
  const Interval bxi = b.extent(common);

  // clip away the parts lying behind the partner's plane
  ax.lo = std::max(ax.lo, 0.0);
  bz.lo = std::max(bz.lo, 0.0);
  if (!(ax.hi > ax.lo) || !(bz.hi > bz.lo)) return 0.0;

  const double xs[2] = {ax.lo, ax.hi}, ys[2] = {ay.lo, ay.hi};
  const double etas[2] = {bz.lo, bz.hi}, xis[2] = {bxi.lo, bxi.hi};
  double sum = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          const double sign = ((i + j + k + l) % 2 == 0) ? 1.0 : -1.0;
          sum += sign * perpendicular_kernel(xs[i], ys[j], etas[k], xis[l]);
        }
  return std::clamp(sum / a.area(), 0.0, 1.0);
}

double view_factor(const Rect3& a, const Rect3& b) {
  if (a.normal_axis() == b.normal_axis()) return vf_parallel_rects(a, b);
  return vf_perpendicular_rects(a, b);
}

std::array<Rect3, 5> PassengerCuboid::faces() const {
  const double h = 0.5 * kWidth;
  const double w = kWidth;
  const double t = kHeight;
  return {
      Rect3(Vec3(x + h, y - h, 0.0), Vec3(0, w, 0), Vec3(0, 0, t)),   // +x
      Rect3(Vec3(x - h, y - h, 0.0), Vec3(0, 0, t), Vec3(0, w, 0)),   // -x
      Rect3(Vec3(x - h, y + h, 0.0), Vec3(0, 0, t), Vec3(w, 0, 0)),   // +y
      Rect3(Vec3(x - h, y - h, 0.0), Vec3(w, 0, 0), Vec3(0, 0, t)),   // -y
      Rect3(Vec3(x - h, y - h, t), Vec3(w, 0, 0), Vec3(0, w, 0)),     // top
  };
}

CabinLayout CabinLayout::with_panel_strip(double total_area, int panel_count, double panel_width) {
  CabinLayout layout;
  layout.set_panel_strip(total_area, panel_count, panel_width);
  return layout;
}

void CabinLayout::set_panel_strip(double total_area, int panel_count, double panel_width) {
  panels.clear();
  if (total_area <= 0.0) return;
  if (panel_count < 1 || !(panel_width > 0.0)) {
    throw ConfigError("panel strip needs at least one panel of positive width");
  }
  const double margin = 1.5;
  const double usable = length - 2.0 * margin;
  const double slot = usable / panel_count;
  const double panel_length = total_area / panel_count / panel_width;
  if (!(usable > 0.0) || panel_length > slot || panel_width > width) {
    throw ConfigError(fmt::format("panel strip of {} m^2 does not fit in {} panels", total_area, panel_count));
  }
  const double y0 = 0.5 * (width - panel_width);
  for (int k = 0; k < panel_count; ++k) {
    const double xc = margin + (k + 0.5) * slot;
    panels.emplace_back(Vec3(xc - 0.5 * panel_length, y0, height), Vec3(0, panel_width, 0),
                        Vec3(panel_length, 0, 0));
  }
}

void CabinLayout::validate() const {
  if (!(length > 0.0 && width > 0.0 && height > PassengerCuboid::kHeight)) {
    throw ConfigError("cabin must be taller than a passenger and have positive extent");
  }
  if (!(pitch >= PassengerCuboid::kWidth)) throw ConfigError("placement pitch must fit a passenger");
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const Rect3& p = panels[i];
    if (p.normal_axis() != 2 || p.normal_sign() > 0.0 || std::abs(p.plane_offset() - height) > 1e-9) {
      throw ConfigError(fmt::format("panel {} is not on the ceiling facing down", i));
    }
    const Interval px = p.extent(0), py = p.extent(1);
    if (px.lo < -1e-9 || px.hi > length + 1e-9 || py.lo < -1e-9 || py.hi > width + 1e-9) {
      throw ConfigError(fmt::format("panel {} extends beyond the ceiling", i));
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Interval qx = panels[j].extent(0), qy = panels[j].extent(1);
      const double ox = std::min(px.hi, qx.hi) - std::max(px.lo, qx.lo);
      const double oy = std::min(py.hi, qy.hi) - std::max(py.lo, qy.lo);
      if (ox > 1e-9 && oy > 1e-9) throw ConfigError(fmt::format("panels {} and {} overlap", j, i));
    }
  }
}

double CabinLayout::panel_area() const {
  double a = 0.0;
  for (const auto& p : panels) a += p.area();
  return a;
}

int CabinLayout::grid_columns() const { return static_cast<int>(std::floor(length / pitch + 1e-9)); }
int CabinLayout::grid_rows() const { return static_cast<int>(std::floor(width / pitch + 1e-9)); }

PassengerCuboid CabinLayout::grid_cell(int index) const {
  const int cols = grid_columns();
  const int rows = grid_rows();
  const int c = index / rows;
  const int r = index % rows;
  // grid centred in the cabin
  const double x0 = 0.5 * (length - cols * pitch);
  const double y0 = 0.5 * (width - rows * pitch);
  return {x0 + (c + 0.5) * pitch, y0 + (r + 0.5) * pitch};
}

std::vector<int> draw_grid_cells(int n, std::uint64_t seed, int capacity) {
  if (n < 0) throw std::invalid_argument("negative passenger count");
  if (n > capacity) {
    throw std::invalid_argument(fmt::format("{} passengers exceed the cabin grid capacity of {}", n, capacity));
  }
  std::vector<int> cells(static_cast<std::size_t>(capacity));
  std::iota(cells.begin(), cells.end(), 0);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> pick(i, capacity - 1);
    std::swap(cells[i], cells[pick(rng)]);
  }
  cells.resize(static_cast<std::size_t>(n));
  return cells;
}

std::vector<PassengerCuboid> place_passengers(int n, std::uint64_t seed, const CabinLayout& layout) {
  std::vector<PassengerCuboid> out;
  for (int cell : draw_grid_cells(n, seed, layout.grid_capacity())) out.push_back(layout.grid_cell(cell));
  return out;
}

double panel_view_weight(const PassengerCuboid& p, const CabinLayout& layout) {
  double seen = 0.0;
  double total = 0.0;
  for (const Rect3& face : p.faces()) {
    double f = 0.0;
    for (const Rect3& panel : layout.panels) f += view_factor(face, panel);
    // F to the shell is the complement, so the face total closes to one
    f = std::clamp(f, 0.0, 1.0);
    seen += face.area() * f;
    total += face.area();
  }
  return seen / total;
}

double mean_radiant_temperature(const PassengerCuboid& p, const CabinLayout& layout, double t_si,
                                double t_rh) {
  if (layout.panels.empty()) return t_si;
  return mean_radiant_temperature(panel_view_weight(p, layout), t_si, t_rh);
}

std::vector<double> cabin_mean_radiant_set(const CabinLayout& layout, double t_si, double t_rh) {
  std::vector<double> out;
  out.reserve(layout.passengers.size());
  for (const auto& p : layout.passengers) out.push_back(mean_radiant_temperature(p, layout, t_si, t_rh));
  return out;
}

}  // namespace cabintherm
