#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cabintherm/comfort.hpp"
#include "cabintherm/errors.hpp"
#include "cabintherm/units.hpp"
#include "oracles.hpp"

using namespace cabintherm;
using doctest::Approx;

namespace {

ComfortSpec iso_spec(const oracle::IsoCase& c) {
  ComfortSpec s;
  s.v_cab = c.v;
  s.phi_cab = c.rh / 100.0;
  s.met = c.met;
  return s;
}

}  // namespace

TEST_SUITE("comfort") {

TEST_CASE("pmv reproduces the ISO validation table") {
  for (const auto& c : oracle::kIsoTable) {
    CAPTURE(c.ta);
    CAPTURE(c.tr);
    CAPTURE(c.v);
    CHECK(std::abs(pmv(to_kelvin(c.ta), to_kelvin(c.tr), c.clo, iso_spec(c)) - c.pmv) <= 0.05);
  }
}

TEST_CASE("pmv monotonicity") {
  const ComfortSpec spec;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> T(5.0, 40.0), C(0.3, 1.8);
  for (int i = 0; i < 300; ++i) {
    const double ta = to_kelvin(T(rng)), tr = to_kelvin(T(rng)), clo = C(rng);
    const double p = pmv(ta, tr, clo, spec);
    CHECK(pmv(ta + 0.5, tr, clo, spec) > p);
    CHECK(pmv(ta, tr + 0.5, clo, spec) > p);
    if (p < -0.1) CHECK(pmv(ta, tr, clo + 0.1, spec) > p);
  }
}

TEST_CASE("ppd") {
  CHECK(ppd(0.0) == 5.0);
  CHECK(ppd(3.0) == Approx(99.1).epsilon(0.1 / 99.1));
  CHECK(ppd(-3.0) == Approx(99.1).epsilon(0.1 / 99.1));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> X(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const double x = X(rng);
    CHECK(ppd(x) == ppd(-x));
    CHECK(ppd(x) >= 5.0);
  }
  // averaging PMV first hides discomfort that averaging PPD shows
  const std::vector<double> pair{0.8, -0.8};
  CHECK(ppd(mean_pmv(pair)) == Approx(5.0));
  CHECK(0.5 * (ppd(0.8) + ppd(-0.8)) > 5.0);
}

TEST_CASE("mean pmv") {
  CHECK(mean_pmv(std::vector<double>{0.5}) == 0.5);
  CHECK(mean_pmv(std::vector<double>{1.0, -1.0}) == 0.0);
  CHECK(mean_pmv(std::vector<double>{0.2, 0.4, 0.9}) == Approx(0.5));
  CHECK_THROWS(mean_pmv(std::vector<double>{}));
}

TEST_CASE("clothing model") {
  const ClothingModel clo;
  CHECK(clo(to_kelvin(26.0)) == ClothingModel::kDefaultFloor);
  CHECK(clo(to_kelvin(35.0)) == ClothingModel::kDefaultFloor);
  // a cold winter day around freezing gives heavy winter clothing
  CHECK(clo(to_kelvin(-1.5)) == Approx(1.4).epsilon(0.02 / 1.4));
  double prev = 1e9;
  for (double t = -40.0; t <= 50.0; t += 0.25) {
    const double v = clo(to_kelvin(t));
    CHECK(v <= prev);
    CHECK(v >= 0.3);
    prev = v;
  }
  // scaling acts before the floor
  const ClothingModel up = clo.scaled(1.01);
  CHECK(up(to_kelvin(0.0)) == Approx(1.01 * clo(to_kelvin(0.0))));
  CHECK(up(to_kelvin(30.0)) == 0.3);
  CHECK_THROWS_AS(ClothingModel({1.0, 0.05, 0.0, 0.0}), ConfigError);  // increasing curve
}

TEST_CASE("surrogate accuracy and shape") {
  const ComfortSpec spec;
  const PmvSurrogate s = PmvSurrogate::fit_default(spec);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> T(to_kelvin(0.0), to_kelvin(45.0)), C(0.3, 1.8);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double ta = T(rng), tr = T(rng), clo = C(rng);
    worst = std::max(worst, std::abs(s(ta, tr, clo) - pmv(ta, tr, clo, spec)));
  }
  CHECK(worst <= 0.05);

  // increasing in air temperature on the fitting grid
  const auto temps = linspace(to_kelvin(0.0), to_kelvin(45.0), 22);
  for (double clo : linspace(0.3, 1.8, 9)) {
    const auto sl = s.slice(clo);
    for (double ta : temps)
      for (double tr : temps) {
        CHECK(sl.evaluate(ta, tr).d_air > 0.0);
      }
  }

  // slice gradient against finite differences
  const auto sl = s.slice(1.1);
  const double h = 1e-5;
  const auto g = sl.evaluate(295.0, 290.0);
  CHECK(g.value == Approx(s(295.0, 290.0, 1.1)).epsilon(1e-12));
  CHECK(g.d_air == Approx((sl.evaluate(295.0 + h, 290.0).value - sl.evaluate(295.0 - h, 290.0).value) / (2 * h)).epsilon(1e-6));
  CHECK(g.d_mr == Approx((sl.evaluate(295.0, 290.0 + h).value - sl.evaluate(295.0, 290.0 - h).value) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("surrogate rejects degenerate grids") {
  const ComfortSpec spec;
  const std::vector<double> one_t{293.15};
  const std::vector<double> one_c{1.0};
  CHECK_THROWS_AS(PmvSurrogate::fit(spec, one_c, one_t, 3), std::invalid_argument);
  const auto t = linspace(280.0, 300.0, 3);
  const auto c = linspace(0.5, 1.0, 2);
  CHECK_THROWS_AS(PmvSurrogate::fit(spec, c, t, 7), std::invalid_argument);
}

TEST_CASE("comfort spec validation") {
  ComfortSpec s;
  CHECK_NOTHROW(s.validate());
  s.psi_min = 0.5;
  s.psi_max = 0.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ComfortSpec{};
  s.phi_cab = 1.2;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = ComfortSpec{};
  s.psi_tgt = 4.0;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

}  // TEST_SUITE
