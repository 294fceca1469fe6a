#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "jnp/functional.hpp"

using namespace jnp;

namespace {

// Piecewise linear reference in plain doubles, built from the node list.
struct Seg {
  double a, b, fa, fb;
};

std::vector<Seg> segments(const TowerSet& ts, double a, double b) {
  std::vector<Seg> out;
  for (const auto& n : ts.nodes()) {
    double s = n.interval.start.to_ext().to_double();
    double e = n.interval.end.to_ext().to_double();
    double lo = std::max(a, s), hi = std::min(b, e);
    if (!(lo < hi)) continue;
    double fl = n.left.to_double(), fr = n.right.to_double();
    auto at = [&](double x) { return fl + (fr - fl) * (x - s) / (e - s); };
    out.push_back({lo, hi, at(lo), at(hi)});
  }
  return out;
}

double seg_integral(const Seg& s) { return (s.b - s.a) * (s.fa + s.fb) / 2; }

double seg_abs_dev(const Seg& s, double c) {
  double da = s.fa - c, db = s.fb - c;
  if ((da >= 0) == (db >= 0)) return std::abs(seg_integral(s) - c * (s.b - s.a));
  double x = s.a + (s.b - s.a) * da / (da - db);
  return std::abs(da) * (x - s.a) / 2 + std::abs(db) * (s.b - x) / 2;
}

double ref_abs_dev(const TowerSet& ts, double a, double b, double c) {
  double covered = 0, acc = 0;
  for (const auto& s : segments(ts, a, b)) {
    covered += s.b - s.a;
    acc += seg_abs_dev(s, c);
  }
  return acc + std::abs(c) * ((b - a) - covered);
}

double ref_mean_osc(const TowerSet& ts, double a, double b) {
  double mass = 0;
  for (const auto& s : segments(ts, a, b)) mass += seg_integral(s);
  return ref_abs_dev(ts, a, b, mass / (b - a)) / (b - a);
}

Interval between(double a, double b) { return Interval(Coord(a), Coord(b)); }

// Half the intervals are uniform in [0,1]; the rest hug a random tower.
Interval random_interval(std::mt19937_64& rng, const TowerSet& ts) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < 0.5) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    return between(a, std::max(b, a + 1e-6));
  }
  auto nodes = ts.nodes();
  const auto& n = nodes[static_cast<std::size_t>(u(rng) * static_cast<double>(nodes.size()))];
  double s = n.interval.start.to_ext().to_double();
  double l = n.interval.measure().to_double();
  double a = s + l * (4 * u(rng) - 2);
  double b = a + l * 4 * u(rng) + 1e-12;
  return between(std::clamp(a, 0.0, 1.0), std::clamp(b, a + 1e-12, 1.0));
}

}  // namespace

TEST_CASE("mean oscillation of one inclined tower is (b - a) / 4") {
  TowerSet u = TowerSet::build(Schedule::u(2.0), 7);
  for (int i = 2; i <= 7; ++i) {
    TowerNode n = u.node(i, 0);
    ExtReal expect = (n.right - n.left) / ExtReal(4.0);
    CHECK(mean_osc(u, n.interval).to_double() == doctest::Approx(expect.to_double()).epsilon(1e-12));
  }
}

TEST_CASE("tower term matches the interval term") {
  for (double power : {1.0, 0.8}) {
    TowerSet g = TowerSet::build(Schedule::g(2.5), 9, power);
    g.for_each_node([&](const TowerNode& n) {
      CHECK(relative_difference(osc_term(g, n, 2.5), osc_term(g, n.interval, 2.5)) < 1e-13);
    });
  }
}

TEST_CASE("mean and infimum oscillation against the piecewise linear reference") {
  TowerSet u = TowerSet::build(Schedule::u(2.0), 4);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    Interval j = random_interval(rng, u);
    if (j.empty()) continue;
    double a = j.start.to_ext().to_double(), b = j.end.to_ext().to_double();
    double ref = ref_mean_osc(u, a, b);
    ExtReal mo = mean_osc(u, j);
    if (ref == 0.0) {
      CHECK(mo.is_zero());
      continue;
    }
    CHECK(mo.to_double() == doctest::Approx(ref).epsilon(1e-7));
    ExtReal io = inf_osc(u, j);
    CHECK(io <= mo);
    CHECK(mo <= io * ExtReal(2.0) * ExtReal(1.0 + 1e-12));
    // The infimum lies below the deviation at any sampled constant.
    double top = u.peak().to_double();
    for (double c : {0.0, top / 16, top / 4, top}) {
      CHECK(io.to_double() <= ref_abs_dev(u, a, b, c) / (b - a) * (1 + 1e-7));
    }
  }
}

TEST_CASE("oscillation of a zero stretch is zero and F needs a positive length") {
  TowerSet g = TowerSet::build(Schedule::g(2.0), 5);
  Coord s = g.node_start(1, 0);
  Interval gap(s - g.level(1).inner_gap_c.half(), s);
  CHECK(mean_osc(g, gap).is_zero());
  CHECK(osc_term(g, gap, 2.0).is_zero());
  CHECK_THROWS_AS(mean_osc(g, Interval(s, s)), std::domain_error);
}

TEST_CASE("translation leaves the functionals unchanged") {
  TowerSet u = TowerSet::build(Schedule::u(3.0), 10);
  Coord shift(ExtReal(0.3125));
  TowerSet v = u.translated(shift);
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Interval j = random_interval(rng, u);
    if (j.empty()) continue;
    Interval k(j.start + shift, j.end + shift);
    CHECK(mean_osc(u, j) == mean_osc(v, k));
    CHECK(inf_osc(u, j) == inf_osc(v, k));
  }
}

TEST_CASE("jnp_sum rejects overlaps and accepts touching intervals") {
  TowerSet u = TowerSet::build(Schedule::u(2.0), 6);
  std::vector<Interval> ok{between(0.1, 0.3), between(0.3, 0.6)};
  std::vector<Interval> bad{between(0.1, 0.3), between(0.29, 0.6)};
  CHECK(jnp_sum(u, ok, 2.0) == osc_term(u, ok[0], 2.0) + osc_term(u, ok[1], 2.0));
  CHECK_THROWS_AS(jnp_sum(u, bad, 2.0), PreconditionError);
  CHECK_THROWS_AS(vjn_modulus_terms(u, ExtReal(0.1), ok, 2.0), PreconditionError);
  CHECK(vjn_modulus_terms(u, ExtReal(0.3), ok, 2.0) == jnp_sum(u, ok, 2.0));
}

TEST_CASE("Hoelder bound on the tower intervals") {
  for (double p : {1.5, 2.0, 3.0}) {
    TowerSet u = TowerSet::build(Schedule::u(p), 12);
    std::vector<Interval> js;
    for (const auto& n : u.nodes()) js.push_back(n.interval);
    ExtReal lhs = jnp_sum(u, js, p);
    CHECK(lhs <= ExtReal::exp2_real(p) * u.lp_mass(p));
  }
}

TEST_CASE("classification by distance from the anchor tower") {
  TowerSet u = TowerSet::build(Schedule::u(2.0), 12);
  const int i = 3;
  TowerNode n = u.node(i, 2);
  const LevelData& L = u.level(i);
  const Coord& s = n.interval.start;
  const Coord& e = n.interval.end;

  Classification c = classify(u, n.interval);
  CHECK(c.cls == OscClass::Contained);
  CHECK(c.level == i);
  CHECK(c.path == 2);
  CHECK(c.outside.is_zero());

  CHECK(classify(u, Interval(s + L.width_c.half(), e)).cls == OscClass::Contained);
  CHECK(classify(u, Interval(s, e + L.inner_gap_c)).cls == OscClass::Short);
  Classification med = classify(u, Interval(s - L.inner_gap_c, e + L.inner_gap_c));
  CHECK(med.cls == OscClass::Medium);
  CHECK(med.outside == 2 * L.inner_gap_c);
  CHECK(classify(u, Interval(s - L.reach_c, e + L.reach_c)).cls == OscClass::Medium);
  CHECK(classify(u, Interval(s - L.reach_c - L.reach_c, e + L.width_c)).cls == OscClass::Long);

  // Only the gap to the right of the level-12 towers: no tower is met.
  TowerNode leaf = u.node(12, 0);
  CHECK(classify(u, Interval(leaf.interval.end, leaf.interval.end + u.level(12).inner_gap_c.half())).cls ==
        OscClass::None);
}

TEST_CASE("F(J) bound terms by class") {
  const double p = 2.0, q = 3.0;
  TowerSet v = TowerSet::build(Schedule::u(p), 16, p / q);
  std::mt19937_64 rng(5);
  int seen[5] = {};
  for (int trial = 0; trial < 400; ++trial) {
    Interval j = random_interval(rng, v);
    if (j.empty() || classify(v, j).cls == OscClass::None) continue;
    FjBound b = fj_bound_check(v, j, p, q);
    ++seen[static_cast<int>(b.cls.cls)];
    CHECK(std::isfinite(b.ratio));
    CHECK(b.rhs.sign() > 0);
    CHECK(b.class_rhs.sign() > 0);
    CHECK(b.lhs <= b.rhs * ExtReal(64.0));
  }
  for (int k = 1; k < 5; ++k) CHECK(seen[k] > 0);
}

TEST_CASE("auki on a flat tower is |I| h^p") {
  const double p = 2.0;
  TowerSet g = TowerSet::build(Schedule::g(p), 8);
  for (int i = 1; i <= 8; ++i) {
    TowerNode n = g.node(i, 0);
    ExtReal expect = n.interval.measure() * pow_real(n.left, p);
    CHECK(auki(g, n.interval, p).to_double() / expect.to_double() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("big cube oscillation scales with the cube volume") {
  const double p = 2.0;
  TowerSet u = TowerSet::build(Schedule::u(p), 10);
  ExtReal base = big_cube_osc(u, ExtReal::one(), 1, p);
  ExtReal unit_dev = u.integral_abs_dev(u.domain(), u.integral(u.domain()));
  CHECK(base == unit_dev);
  for (int n = 1; n <= 3; ++n) {
    for (int e = 1; e <= 10; ++e) {
      double ratio = (big_cube_osc(u, ExtReal::pow2(e), n, p) / base).to_double();
      CHECK(std::log2(ratio) == doctest::Approx(n * e * (1 / p - 1)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(big_cube_osc(u, ExtReal(0.5), 1, p), PreconditionError);
}

TEST_CASE("product reduction keeps the mean oscillation") {
  TowerSet u = TowerSet::build(Schedule::u(2.0), 14);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Interval j = random_interval(rng, u);
    if (j.empty()) continue;
    auto [prod, line] = product_reduction(u, j, ExtReal(0.1 + trial));
    if (line.is_zero()) {
      CHECK(prod.is_zero());
      continue;
    }
    CHECK(std::abs((prod / line).to_double() - 1.0) <= std::exp2(-35));
  }
}

TEST_CASE("weak Lp of g just below the tower heights") {
  const double p = 2.0;
  TowerSet g = TowerSet::build(Schedule::g(p), 20);
  for (int i = 1; i <= 20; ++i) {
    ExtReal h = g.schedule().roof_left(i);
    ExtReal t = h * ExtReal(1.0 - 1e-12);
    std::vector<ExtReal> ts{t};
    CompensatedSum direct;
    for (int j = i; j <= 20; ++j) direct.add(g.schedule().width(j).ldexp(j - 1));
    ExtReal expect = pow_real(t, p) * direct.value();
    CHECK(weak_lp(g, p, ts).to_double() / expect.to_double() == doctest::Approx(1.0).epsilon(1e-9));
  }
  std::vector<ExtReal> above{g.peak() * ExtReal(2.0)};
  CHECK(weak_lp(g, p, above).is_zero());
  std::vector<ExtReal> bad{ExtReal(-1.0)};
  CHECK_THROWS_AS(weak_lp(g, p, bad), PreconditionError);
}

TEST_CASE("the power transform lowers the per interval term") {
  const double p = 2.0, q = 3.0;
  TowerSet u = TowerSet::build(Schedule::u(p), 20);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    Interval j = random_interval(rng, u);
    if (j.empty()) continue;
    auto [lhs, rhs] = per_interval_q_monotonicity(u, j, p, q);
    CHECK(lhs <= rhs * ExtReal(1.0 + std::exp2(-30)));
  }
  Interval j = u.node(2, 1).interval;
  auto [l, r] = per_interval_q_monotonicity(u, j, p, p);
  CHECK(l == r);
  CHECK_THROWS_AS(per_interval_q_monotonicity(u, j, 3.0, 2.0), PreconditionError);
}

TEST_CASE("Taylor estimate") {
  auto [l1, r1] = taylor_check(1, 2.0, 3.0);
  CHECK(l1.to_double() == doctest::Approx(std::exp2(2.0 / 3.0)).epsilon(1e-15));
  CHECK(r1 == ExtReal(2.0));
  for (auto [p, q] : {std::pair{1.5, 2.0}, {2.0, 2.01}, {2.0, 3.0}, {3.0, 3.5}}) {
    for (std::int64_t i : {1, 2, 3, 10, 100, 1000, 10000}) {
      auto [lhs, rhs] = taylor_check(i, p, q);
      CHECK(lhs <= rhs);
    }
  }
  CHECK_THROWS_AS(taylor_check(0, 2.0, 3.0), PreconditionError);
  CHECK_THROWS_AS(taylor_check(5, 3.0, 2.0), PreconditionError);
}

TEST_CASE("batch evaluation matches the serial loop") {
  TowerSet u = TowerSet::build(Schedule::u(2.0), 12);
  const int level = 10;
  IntervalGen make = [&](std::uint64_t path) { return u.node(level, path).interval; };
  auto par = osc_terms(u, u.nodes_at(level), make, 2.0);
  auto ser = osc_terms_serial(u, u.nodes_at(level), make, 2.0);
  REQUIRE(par.size() == ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) CHECK(par[k] == ser[k]);
}
