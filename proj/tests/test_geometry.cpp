#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "cabintherm/errors.hpp"
#include "cabintherm/geometry.hpp"
#include "cabintherm/units.hpp"
#include "oracles.hpp"

using namespace cabintherm;
using doctest::Approx;

namespace {

// a on z = 0 facing up, b on z = gap facing down
Rect3 floor_rect(double x, double y, double lx, double ly) {
  return Rect3(Vec3(x, y, 0.0), Vec3(lx, 0, 0), Vec3(0, ly, 0));
}
Rect3 ceiling_rect(double x, double y, double z, double lx, double ly) {
  return Rect3(Vec3(x, y, z), Vec3(0, ly, 0), Vec3(lx, 0, 0));
}

// the six inner surfaces of the cabin, all facing inward
std::vector<Rect3> enclosure(const CabinLayout& c) {
  const double L = c.length, W = c.width, H = c.height;
  return {
      Rect3(Vec3(0, 0, 0), Vec3(L, 0, 0), Vec3(0, W, 0)),  // floor, +z
      Rect3(Vec3(0, 0, H), Vec3(0, W, 0), Vec3(L, 0, 0)),  // ceiling, -z
      Rect3(Vec3(0, 0, 0), Vec3(0, W, 0), Vec3(0, 0, H)),  // front, +x
      Rect3(Vec3(L, 0, 0), Vec3(0, 0, H), Vec3(0, W, 0)),  // rear, -x
      Rect3(Vec3(0, 0, 0), Vec3(0, 0, H), Vec3(L, 0, 0)),  // side, +y
      Rect3(Vec3(0, W, 0), Vec3(L, 0, 0), Vec3(0, 0, H)),  // side, -y
  };
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("rect3 construction") {
  CHECK_THROWS_AS(Rect3(Vec3::Zero(), Vec3(1, 1, 0), Vec3(0, 0, 1)), std::invalid_argument);
  CHECK_THROWS_AS(Rect3(Vec3::Zero(), Vec3(1, 0, 0), Vec3(2, 0, 0)), std::invalid_argument);
  const Rect3 r = floor_rect(0, 0, 2, 3);
  CHECK(r.area() == 6.0);
  CHECK(r.normal_axis() == 2);
  CHECK(r.normal_sign() == 1.0);
}

TEST_CASE("parallel view factor limits") {
  const Rect3 a = floor_rect(0, 0, 1, 1);
  CHECK(vf_parallel_rects(a, ceiling_rect(0, 0, 1e4, 1, 1)) < 1e-8);
  CHECK(vf_parallel_rects(a, ceiling_rect(0, 0, 1e-4, 1, 1)) > 0.999);
  // known table value: coaxial unit squares one side apart
  CHECK(vf_parallel_rects(a, ceiling_rect(0, 0, 1.0, 1, 1)) == Approx(0.19982).epsilon(1e-4));
  // same orientation or wrong side: nothing exchanged
  CHECK(vf_parallel_rects(a, floor_rect(0, 0, 1, 1)) == 0.0);
  CHECK(vf_parallel_rects(a, ceiling_rect(0, 0, -1, 1, 1)) == 0.0);
}

TEST_CASE("perpendicular view factor: table value and clipping") {
  // common edge, equal unit squares: 0.20004
  const Rect3 a = floor_rect(0, 0, 1, 1);
  const Rect3 wall(Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1));  // x = 0, facing +x
  CHECK(vf_perpendicular_rects(a, wall) == Approx(0.20004).epsilon(1e-4));
  // a wall facing away sees nothing
  const Rect3 away(Vec3(0, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0));
  CHECK(vf_perpendicular_rects(a, away) == 0.0);
  // the part of a wall below the floor plane is ignored
  const Rect3 deep(Vec3(0, 0, -1), Vec3(0, 1, 0), Vec3(0, 0, 2));
  CHECK(vf_perpendicular_rects(a, deep) == Approx(vf_perpendicular_rects(a, wall)).epsilon(1e-12));
}

TEST_CASE("view factors against the ray-sampling oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> P(-1.0, 1.0), S(0.3, 1.5), G(0.3, 1.5);
  for (int i = 0; i < 4; ++i) {
    const Rect3 a = floor_rect(P(rng), P(rng), S(rng), S(rng));
    const Rect3 b = ceiling_rect(P(rng), P(rng), G(rng), S(rng), S(rng));
    CHECK(std::abs(vf_parallel_rects(a, b) - oracle::mc_view_factor(a, b, 20, 20, i)) <= 3e-3);
    const double x0 = P(rng) + 1.5;
    const Rect3 w(Vec3(x0, P(rng), P(rng) * 0.5), Vec3(0, 0, S(rng)), Vec3(0, S(rng), 0));  // facing -x
    const double f = vf_perpendicular_rects(a, w);
    CHECK(std::abs(f - oracle::mc_view_factor(a, w, 20, 20, 100 + i)) <= 3e-3);
  }
}

TEST_CASE("reciprocity and additivity") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> P(-1.0, 1.0), S(0.2, 2.0);
  for (int i = 0; i < 50; ++i) {
    const Rect3 a = floor_rect(P(rng), P(rng), S(rng), S(rng));
    const Rect3 b = ceiling_rect(P(rng), P(rng), S(rng), S(rng), S(rng));
    const double ab = a.area() * vf_parallel_rects(a, b);
    CHECK(ab == Approx(b.area() * vf_parallel_rects(b, a)).epsilon(1e-9));

    const double x0 = 1.5 + P(rng);
    const double y0 = P(rng), z0 = 0.5 * P(rng), ly = S(rng), lz = S(rng);
    const Rect3 w(Vec3(x0, y0, z0), Vec3(0, 0, lz), Vec3(0, ly, 0));
    const double aw = a.area() * vf_perpendicular_rects(a, w);
    CHECK(aw == Approx(w.area() * vf_perpendicular_rects(w, a)).epsilon(1e-9));

    // splitting the target adds up
    const Rect3 w1(Vec3(x0, y0, z0), Vec3(0, 0, lz), Vec3(0, 0.4 * ly, 0));
    const Rect3 w2(Vec3(x0, y0 + 0.4 * ly, z0), Vec3(0, 0, lz), Vec3(0, 0.6 * ly, 0));
    CHECK(vf_perpendicular_rects(a, w1) + vf_perpendicular_rects(a, w2) ==
          Approx(vf_perpendicular_rects(a, w)).epsilon(1e-9));
    const double gap = b.plane_offset();
    const Rect3 c1 = ceiling_rect(P(rng), P(rng), gap, 0.7, 1.0);
    const Rect3 c2(Vec3(c1.extent(0).hi, c1.extent(1).lo, gap), Vec3(0, 1.0, 0), Vec3(0.5, 0, 0));
    const Rect3 c12(Vec3(c1.extent(0).lo, c1.extent(1).lo, gap), Vec3(0, 1.0, 0), Vec3(1.2, 0, 0));
    CHECK(std::abs(vf_parallel_rects(a, c1) + vf_parallel_rects(a, c2) - vf_parallel_rects(a, c12)) <= 1e-9);
  }
}

TEST_CASE("passenger faces see the whole enclosure") {
  const CabinLayout cabin;
  const auto walls = enclosure(cabin);
  for (const auto& p : place_passengers(20, 5, cabin)) {
    for (const Rect3& f : p.faces()) {
      double sum = 0.0;
      for (const Rect3& w : walls) sum += view_factor(f, w);
      CHECK(sum == Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("placement") {
  const CabinLayout cabin;
  CHECK(place_passengers(0, 1, cabin).empty());
  const auto a = place_passengers(30, 99, cabin);
  const auto b = place_passengers(30, 99, cabin);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
  }
  const double h = 0.5 * PassengerCuboid::kWidth;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x - h >= 0.0);
    CHECK(a[i].x + h <= cabin.length);
    CHECK(a[i].y - h >= 0.0);
    CHECK(a[i].y + h <= cabin.width);
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool apart = std::abs(a[i].x - a[j].x) >= 2 * h || std::abs(a[i].y - a[j].y) >= 2 * h;
      CHECK(apart);
    }
  }
  CHECK_THROWS_AS(place_passengers(cabin.grid_capacity() + 1, 1, cabin), std::invalid_argument);
  CHECK_NOTHROW(place_passengers(cabin.grid_capacity(), 1, cabin));
  const auto cells = draw_grid_cells(50, 3, 60);
  auto sorted = cells;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
}

TEST_CASE("panel strip") {
  const CabinLayout c = CabinLayout::with_panel_strip(4.0);
  CHECK(c.panel_area() == Approx(4.0));
  CHECK(c.panels.size() == 4);
  for (const Rect3& p : c.panels) {
    CHECK(p.normal_axis() == 2);
    CHECK(p.normal_sign() == -1.0);
    CHECK(p.plane_offset() == c.height);
  }
  CHECK_NOTHROW(c.validate());
  CHECK_THROWS_AS(CabinLayout::with_panel_strip(40.0), ConfigError);
  CabinLayout overlap = c;
  overlap.panels.push_back(c.panels.front());
  CHECK_THROWS_AS(overlap.validate(), ConfigError);
}

TEST_CASE("mean radiant temperature") {
  CabinLayout bare;
  const PassengerCuboid p{9.0, 1.2};
  CHECK(mean_radiant_temperature(p, bare, 293.15, 363.15) == Approx(293.15).epsilon(1e-14));
  const CabinLayout c = CabinLayout::with_panel_strip(4.0);
  CHECK(mean_radiant_temperature(p, c, 300.0, 300.0) == Approx(300.0).epsilon(1e-14));
  const double t = mean_radiant_temperature(p, c, 293.15, 343.15);
  CHECK(t > 293.15);
  CHECK(t < 343.15);
  CHECK(panel_view_weight(p, c) > 0.0);
  CHECK(panel_view_weight(p, c) < 1.0);

  // under the panels warmer than at the very front
  const PassengerCuboid front{0.25, 0.25};
  CHECK(mean_radiant_temperature(p, c, 293.15, 343.15) > mean_radiant_temperature(front, c, 293.15, 343.15));
  CHECK(mean_radiant_temperature(front, c, 293.15, 343.15) - 293.15 < 1.0);

  CabinLayout fig = c;
  fig.passengers = place_passengers(30, 8, c);
  const auto set = cabin_mean_radiant_set(fig, 293.15, 343.15);
  REQUIRE(set.size() == 30);
  for (std::size_t i = 0; i < set.size(); ++i) {
    CHECK(set[i] == mean_radiant_temperature(fig.passengers[i], fig, 293.15, 343.15));
    CHECK(set[i] >= 293.15);
    CHECK(set[i] <= 343.15);
  }
  CHECK(*std::max_element(set.begin(), set.end()) > *std::min_element(set.begin(), set.end()));
  fig.passengers.clear();
  CHECK(cabin_mean_radiant_set(fig, 293.15, 343.15).empty());
}

}  // TEST_SUITE
