#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "jnp/coord.hpp"
#include "jnp/roof.hpp"

using jnp::Coord;
using jnp::ExtReal;
using jnp::Interval;

TEST_CASE("coord round trips ExtReal values") {
  for (double v : {0.0, 0.5, -0.75, 1.0 / 3.0, 1e-200, 12345.678}) {
    CHECK(Coord(v).to_double() == v);
  }
  ExtReal deep = ExtReal::compose(1, 1.681792830507429, -931);
  CHECK(Coord(deep).to_ext() == deep);
  CHECK_THROWS_AS(Coord(ExtReal::pow2(70)), std::out_of_range);
}

TEST_CASE("coord keeps tiny offsets next to large positions") {
  Coord half(0.5);
  Coord tiny(ExtReal::pow2(-900));
  Coord x = half + tiny;
  CHECK(x > half);
  CHECK((x - half) == tiny);
  CHECK((x - half).to_ext() == ExtReal::pow2(-900));
  CHECK((3 * tiny).to_ext() == ExtReal(3.0).ldexp(-900));
  CHECK(tiny.half().to_ext() == ExtReal::pow2(-901));
}

TEST_CASE("intervals") {
  Interval a(0.0, 0.5), b(0.25, 1.0), c(0.5, 0.75);
  CHECK(jnp::overlaps(a, b));
  CHECK_FALSE(jnp::overlaps(a, c));
  CHECK(jnp::intersect(a, c).empty());
  CHECK(jnp::intersect(a, b) == Interval(0.25, 0.5));
  CHECK(jnp::contains(b, c));
  CHECK(Interval(0.25, 0.75).measure() == ExtReal(0.5));
  CHECK_THROWS_AS(Interval(1.0, 0.0), std::invalid_argument);
}

namespace {

// Composite Simpson on [0, len] of |(y0 + dy x / len)^r - c|, split at the crossing.
double simpson_abs(double y0, double dy, double len, double r, double c) {
  auto f = [&](double x) { return std::fabs(std::pow(y0 + dy * x / len, r) - c); };
  auto simpson = [&](double a, double b) {
    const int n = 20000;
    double h = (b - a) / n, s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 ? 4 : 2);
    return s * h / 3;
  };
  double cross = -1;
  if (dy != 0 && c > 0) cross = (std::pow(c, 1.0 / r) - y0) / dy * len;
  if (cross > 0 && cross < len) return simpson(0, cross) + simpson(cross, len);
  return simpson(0, len);
}

}  // namespace

TEST_CASE("power_excess is continuous across the series switch") {
  for (double m : {1.5, 2.0, 2.5, 5.0 / 3.0}) {
    for (double w : {-9.99e-4, 9.99e-4}) {
      double series = jnp::roof::power_excess(w, m);
      double direct = (std::pow(1 + w, m) - 1 - m * w) / m;
      CHECK(series == doctest::Approx(direct).epsilon(1e-7));
    }
    CHECK(jnp::roof::power_excess(0.0, m) == 0.0);
  }
}

TEST_CASE("roof closed forms against Simpson") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 200; ++it) {
    double y0 = 3 * u(rng), dy = 4 * u(rng) - 2, len = 0.1 + u(rng);
    if (y0 + dy < 0) dy = -y0 * u(rng);
    double r = it % 3 == 0 ? 1.0 : 0.3 + 2 * u(rng);
    double hi = std::pow(std::max(y0, y0 + dy), r);
    double c = it % 5 == 0 ? 0.0 : hi * 1.2 * u(rng);
    ExtReal Y0(y0), DY(dy), L(len), C(c);
    double want_int = simpson_abs(y0, dy, len, r, 0.0);
    CHECK(jnp::roof::integral(Y0, DY, L, r).to_double() == doctest::Approx(want_int).epsilon(1e-8));
    double want_dev = simpson_abs(y0, dy, len, r, c);
    CHECK(jnp::roof::abs_dev(Y0, DY, L, r, C).to_double() ==
          doctest::Approx(want_dev).epsilon(1e-7).scale(hi * len));
  }
}

TEST_CASE("measure_above on a rising roof") {
  // y from 1 to 3 over length 2, r = 1: {y > 2} has measure 1.
  CHECK(jnp::roof::measure_above(ExtReal(1.0), ExtReal(2.0), ExtReal(2.0), 1.0, ExtReal(2.0)) ==
        ExtReal(1.0));
  // r = 2: {y^2 > 4} is the same set.
  CHECK(jnp::roof::measure_above(ExtReal(1.0), ExtReal(2.0), ExtReal(2.0), 2.0, ExtReal(4.0))
            .to_double() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(jnp::roof::measure_above(ExtReal(1.0), ExtReal(), ExtReal(2.0), 1.0, ExtReal(1.0)).is_zero());
  CHECK(jnp::roof::measure_above(ExtReal(1.0), ExtReal(), ExtReal(2.0), 1.0, ExtReal(0.5)) ==
        ExtReal(2.0));
}
