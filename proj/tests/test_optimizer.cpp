#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "jnp/functional.hpp"
#include "jnp/optimizer.hpp"
#include "jnp/oracle.hpp"

using namespace jnp;

namespace {

double harmonic(int n) {
  double h = 0;
  for (int i = n; i >= 1; --i) h += 1.0 / i;
  return h;
}

double rel(const ExtReal& a, const ExtReal& b) {
  if (a == b) return 0.0;
  return std::abs(((a - b) / max(abs(a), abs(b))).to_double());
}

// A few tower endpoints plus random points, at most `size` in total.
BreakpointGrid small_grid(std::mt19937_64& rng, const TowerSet& ts, std::size_t size) {
  std::vector<std::pair<Coord, PointTag>> pts;
  auto nodes = ts.nodes();
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  while (pts.size() + 2 <= size) {
    const auto& n = nodes[pick(rng)];
    pts.emplace_back(n.interval.start, PointTag::TowerEdge);
    pts.emplace_back(u(rng) < 0.5 ? n.interval.end : Coord(u(rng)), PointTag::TowerEdge);
  }
  return BreakpointGrid::from(std::move(pts));
}

void check_feasible(const TowerSet& f, double p, const DpResult& r, const std::optional<Coord>& cap) {
  require_disjoint(r.partition);
  for (const auto& j : r.partition) {
    CHECK(contains(f.domain(), j));
    if (cap) CHECK(j.length() <= *cap);
  }
  CHECK(rel(jnp_sum(f, r.partition, p), r.value) <= std::exp2(-35));
}

}  // namespace

TEST_CASE("candidate grid sizes and contents") {
  TowerSet u2 = TowerSet::build(Schedule::u(2.0), 2);
  CHECK(candidate_grid(u2, 0).size() == 8);
  for (int refine = 0; refine <= 3; ++refine) {
    TowerSet ts = TowerSet::build(Schedule::u(2.0), 6);
    BreakpointGrid g = candidate_grid(ts, refine);
    CHECK(g.size() <= static_cast<std::size_t>((1 << 7) * (refine + 2)));
    for (std::size_t k = 1; k < g.size(); ++k) REQUIRE(g.points[k - 1] < g.points[k]);
    CHECK(g.points.front() == ts.domain().start);
    CHECK(g.points.back() == ts.domain().end);
    for (const auto& n : ts.nodes()) {
      CHECK_NOTHROW(g.index_of(n.interval.start));
      CHECK_NOTHROW(g.index_of(n.interval.end));
    }
  }
  CHECK_THROWS_AS(candidate_grid(TowerSet::build(Schedule::u(2.0), 21), 0), std::length_error);
  CHECK_THROWS_AS(candidate_grid(u2, -1), PreconditionError);
}

TEST_CASE("dp equals exhaustive search on small grids") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    double p = trial % 2 ? 2.0 : 3.0;
    TowerSet ts = TowerSet::build(Schedule::of(trial % 3 ? Family::U : Family::G, p), 6);
    BreakpointGrid grid = small_grid(rng, ts, 8 + static_cast<std::size_t>(trial % 7));
    REQUIRE(grid.size() <= 14);
    CHECK(dp_max(ts, p, grid).value == brute_force_max(ts, p, grid));
    ExtReal cap = ts.gap_inner(2);
    DpResult capped = dp_max(ts, p, grid, cap);
    CHECK(capped.value == brute_force_max(ts, p, grid, cap));
    check_feasible(ts, p, capped, Coord(cap));
  }
}

TEST_CASE("parallel and serial dp agree on value and partition") {
  TowerSet ts = TowerSet::build(Schedule::u(2.0), 5);
  BreakpointGrid grid = candidate_grid(ts, 2);
  for (std::optional<ExtReal> cap : {std::optional<ExtReal>{}, std::optional<ExtReal>{ts.gap_inner(1)}}) {
    DpResult a = dp_max(ts, 2.0, grid, cap);
    DpResult b = dp_max_serial(ts, 2.0, grid, cap);
    CHECK(a.value == b.value);
    REQUIRE(a.partition.size() == b.partition.size());
    for (std::size_t k = 0; k < a.partition.size(); ++k) {
      CHECK(a.partition[k].start == b.partition[k].start);
      CHECK(a.partition[k].end == b.partition[k].end);
    }
    std::optional<Coord> c;
    if (cap) c = Coord(*cap);
    check_feasible(ts, 2.0, a, c);
  }
}

TEST_CASE("dp monotonicity and witness feasibility") {
  const double p = 2.0;
  TowerSet ts = TowerSet::build(Schedule::u(p), 6);
  BreakpointGrid g0 = candidate_grid(ts, 0);
  BreakpointGrid g1 = candidate_grid(ts, 1);
  ExtReal v0 = dp_max(ts, p, g0).value;
  ExtReal v1 = dp_max(ts, p, g1).value;
  CHECK(v0 <= v1);
  CHECK(jnp_sum(ts, witness_dyadic(ts), p) <= v0);
  ExtReal prev = v1;
  for (int k = 1; k <= 6; ++k) {
    ExtReal capped = dp_max(ts, p, g1, ts.gap_inner(k)).value;
    CHECK(capped <= prev);
    prev = capped;
  }
}

TEST_CASE("dp of the zero function is empty") {
  TowerSet z = TowerSet::build(Schedule::custom(2.0, std::vector<double>(3, 0.0)), 3);
  DpResult r = dp_max(z, 2.0, candidate_grid(z, 1));
  CHECK(r.value.is_zero());
  CHECK(r.partition.empty());
}

TEST_CASE("fixed value extras take part in the recursion") {
  std::vector<std::pair<Coord, PointTag>> pts;
  for (int k = 0; k <= 4; ++k) pts.emplace_back(Coord(k / 4.0), PointTag::Boundary);
  BreakpointGrid grid = BreakpointGrid::from(pts);
  WeightFn w = [](const Interval& j) { return j.measure(); };
  std::vector<DpExtra> extras{{0, 4, ExtReal(0.5)}, {1, 3, ExtReal(0.75)}};
  DpResult r = dp_solve(grid, w, Coord(0.25), extras);
  // 1/4 + 3/4 + 1/4 beats both the plain quarters and the long extra.
  CHECK(r.value == ExtReal(1.25));
  REQUIRE(r.choices.size() == 3);
  CHECK(r.choices[1].extra == 1);
  DpResult s = dp_solve_serial(grid, w, Coord(0.25), extras);
  CHECK(s.value == r.value);
  CHECK(brute_force_max(grid, w, Coord(0.25)) == ExtReal(1.0));
}

TEST_CASE("dyadic witness sum of u is harmonic") {
  for (double p : {1.5, 2.0, 3.0}) {
    const int n = 14;
    TowerSet u = TowerSet::build(Schedule::u(p), n);
    auto w = witness_dyadic(u);
    CHECK(w.size() == (1u << n) - 1);
    double expect = std::exp2(-1.25 - p) * harmonic(n);
    CHECK(rel(jnp_sum(u, w, p), ExtReal(expect)) < 1e-9);
  }
}

TEST_CASE("Lp mass of g0 is harmonic and matches quadrature for u") {
  for (int n : {1, 5, 24}) {
    TowerSet g0 = TowerSet::build(Schedule::g0(2.0), n);
    CHECK(rel(lp_mass(g0, 2.0), ExtReal(std::exp2(-1.25) * harmonic(n))) < 1e-9);
  }
  TowerSet u = TowerSet::build(Schedule::u(3.0), 6);
  TowerSet up = u.with_power(3.0);
  CHECK(rel(lp_mass(u, 3.0), quad(up, up.domain())) < 1e-6);
}

TEST_CASE("cover witnesses of g") {
  const double p = 2.0;
  TowerSet g = TowerSet::build(Schedule::g(p), 14);
  int k0 = cover_threshold(g);
  CHECK(k0 >= 1);
  CHECK(cover_average_ratio(g, k0) <= ExtReal(0.75));
  if (k0 > 1) {
    try {
      witness_cover(g, k0 - 1);
      FAIL("expected a precondition error");
    } catch (const PreconditionError& e) {
      CHECK(std::string(e.what()).find(std::to_string(k0)) != std::string::npos);
    }
  }
  ExtReal per = ExtReal::exp2_real(0.75 - 3 * p);
  ExtReal level_bound = ExtReal::exp2_real(-0.25 - 3 * p);
  for (int k = k0; k <= 13; ++k) {
    auto js = witness_cover(g, k);
    REQUIRE(js.size() == g.nodes_at(k));
    require_disjoint(js);
    for (std::size_t path = 0; path < js.size(); ++path) {
      const Interval& j = js[path];
      CHECK(osc_term(g, j, p) >= per * ExtReal::pow2(-k));
      // The level-k tower is met whole (as a subtree root or as an unclipped
      // piece) and nothing of a lower level is met.
      Cover cov = g.cover(j);
      int at_k = 0;
      for (const auto& [lvl, pth] : cov.full_roots) {
        CHECK(lvl >= k);
        if (lvl == k) {
          ++at_k;
          CHECK(pth == path);
        }
      }
      for (const auto& pc : cov.pieces) {
        CHECK(pc.level >= k);
        if (pc.level == k) {
          ++at_k;
          CHECK(pc.path == path);
          CHECK(pc.length_c == g.level(k).width_c);
        }
      }
      CHECK(at_k == 1);
    }
    CHECK(jnp_sum(g, js, p) >= level_bound);
  }
  CHECK_THROWS_AS(witness_cover(g, 14), PreconditionError);
}

TEST_CASE("modulus search partitions reproduce the value") {
  for (Family fam : {Family::G0, Family::U}) {
    const double p = 2.0;
    TowerSet f = TowerSet::build(Schedule::of(fam, p), 9);
    ModulusSearch ms(f, p, 3);
    ExtReal prev;
    for (int k = 1; k <= 8; ++k) {
      ModulusPoint pt = ms.at_level(k);
      CHECK(pt.value == pt.towers_part + pt.subtree_part);
      auto part = ms.partition(k);
      for (const auto& j : part) CHECK(j.measure() <= pt.cap);
      CHECK(rel(vjn_modulus_terms(f, pt.cap, part, p), pt.value) <= std::exp2(-35));
      if (k > 1) CHECK(pt.value <= prev);
      prev = pt.value;
    }
    CHECK_THROWS_AS(ms.at_level(9), PreconditionError);
  }
}

TEST_CASE("modulus search never beats a direct capped dp by much and dominates the witnesses") {
  const double p = 2.0;
  TowerSet g = TowerSet::build(Schedule::g(p), 8);
  ModulusSearch ms(g, p);
  int k0 = cover_threshold(g);
  for (int k = std::max(k0, 1); k <= 6; ++k) {
    ExtReal cap = g.gap_inner(k);
    auto covers = witness_cover(g, k);
    bool fits = true;
    for (const auto& j : covers) fits = fits && j.measure() <= cap;
    if (fits) CHECK(jnp_sum(g, covers, p) <= ms.at_level(k).value);
    CHECK(ms.at_level(k).value.sign() > 0);
  }
}

TEST_CASE("streamed level sums match the per level closed form") {
  for (double p : {1.5, 2.0}) {
    TowerSet u = TowerSet::build(Schedule::u(p), 12);
    auto par = dyadic_level_sums(u, p);
    auto ser = dyadic_level_sums_serial(u, p);
    REQUIRE(par.size() == 13);
    for (int i = 1; i <= 12; ++i) {
      CHECK(par[static_cast<std::size_t>(i)] == ser[static_cast<std::size_t>(i)]);
      CHECK(rel(par[static_cast<std::size_t>(i)], ExtReal(std::exp2(-1.25 - p) / i)) < 1e-9);
    }
  }
}
