#include "jnp/claims.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "jnp/functional.hpp"
#include "jnp/optimizer.hpp"
#include "jnp/oracle.hpp"
#include "jnp/sampling.hpp"
#include "jnp/towers.hpp"

namespace jnp {

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

double ratio_of(const ExtReal& lhs, const ExtReal& rhs) {
  if (rhs.is_zero()) return lhs.is_zero() ? 1.0 : std::numeric_limits<double>::infinity();
  return (lhs / rhs).to_double();
}

bool le(const ExtReal& a, const ExtReal& b, double slack = 0.0) {
  return slack == 0.0 ? a <= b : a <= b * ExtReal(1.0 + slack);
}

bool close(const ExtReal& a, const ExtReal& b, double tol) { return relative_difference(a, b) <= tol; }

double harmonic(int n) {
  double h = 0;
  for (int i = n; i >= 1; --i) h += 1.0 / i;
  return h;
}

ExtReal median_of(std::vector<ExtReal> v) {
  if (v.empty()) return ExtReal();
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  if (v.size() % 2) return v[m];
  return (v[m - 1] + v[m]) * ExtReal(0.5);
}

class Rows {
 public:
  Rows(std::string id, const Params& prm) : id_(std::move(id)), base_(prm.describe()) {}

  void add(const std::string& keys, std::int64_t index, const ExtReal& lhs, const ExtReal& rhs, bool pass,
           std::string note = {}) {
    ClaimReport r;
    r.claim_id = id_;
    r.param_set = keys.empty() ? base_ : base_ + ";" + keys;
    r.index = index;
    r.lhs = lhs;
    r.rhs = rhs;
    r.ratio = ratio_of(lhs, rhs);
    r.pass = pass;
    r.note = std::move(note);
    rows_.push_back(std::move(r));
  }

  std::vector<ClaimReport> take() { return std::move(rows_); }

 private:
  std::string id_;
  std::string base_;
  std::vector<ClaimReport> rows_;
};

// Rows for a per-level series that should not grow: each level is compared
// with (1 + window) times the largest value over the lower half of the levels,
// and optionally one more row records whether the series rises at every step
// of [from, last].
void growth_rows(Rows& out, const std::string& keys, const std::map<int, ExtReal>& by_level, double window,
                 int from, const std::string& what, bool rises_row = true) {
  if (by_level.empty()) return;
  int lo = by_level.begin()->first, hi = by_level.rbegin()->first;
  int mid = lo + (hi - lo) / 2;
  ExtReal early;
  for (const auto& [lvl, v] : by_level)
    if (lvl <= mid) early = max(early, v);
  ExtReal bound = early * ExtReal(1.0 + window);
  for (const auto& [lvl, v] : by_level)
    out.add(keys + ";kind=" + what + "-level", lvl, v, bound, v <= bound, "bound: early maximum +window");
  std::int64_t steps = 0, rises = 0;
  const ExtReal* prev = nullptr;
  for (const auto& [lvl, v] : by_level) {
    if (lvl < from) continue;
    if (prev) {
      ++steps;
      if (*prev < v) ++rises;
    }
    prev = &v;
  }
  if (rises_row && steps > 0)
    out.add(keys + ";kind=" + what + "-rises", from, ExtReal(static_cast<double>(rises)),
            ExtReal(static_cast<double>(steps)), rises < steps, "strict rises over consecutive levels");
}

using ClaimFn = std::function<std::vector<ClaimReport>(const std::string&, const Params&)>;

// --- power decay and single-interval inequalities ---------------------------

std::vector<ClaimReport> c2_powerdecay(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  std::set<double> ps{1.5, 2.0, 3.0, prm.p};
  for (double p : ps) {
    auto terms = ref_dyadic_terms(p, 20);
    for (std::size_t i = 0; i < terms.size(); ++i)
      out.add("f_p=" + num(p) + ";kind=term", static_cast<std::int64_t>(i) + 1, terms[i], terms[0],
              terms[i].sign() > 0 && close(terms[i], terms[0], 1e-10));
    RefFunction f(p);
    std::int64_t k = 0;
    for (double t : {1.0, 1.5, 2.0, 10.0, 1e3, 1e6, 1e12}) {
      ExtReal lvl = f.weak_lp_level(ExtReal(t));
      out.add("f_p=" + num(p) + ";kind=level;t=" + num(t), ++k, lvl, ExtReal::one(),
              close(lvl, ExtReal::one(), prm.tol));
    }
  }
  return out.take();
}

std::vector<ClaimReport> h2_hoelder(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  std::mt19937_64 rng(stream_seed(id, prm.seed));
  for (Family fam : {Family::U, Family::G, Family::G0}) {
    TowerSet f = TowerSet::build(Schedule::of(fam, p), prm.depth);
    ExtReal rhs = ExtReal::exp2_real(p) * f.lp_mass(p);
    std::string fk = "family=" + to_string(fam);
    std::int64_t index = 0;

    std::vector<Interval> towers;
    const int top = std::min(prm.depth, 12);
    for (int i = 1; i <= top; ++i)
      for (std::uint64_t path = 0; path < f.nodes_at(i); ++path) towers.push_back(f.node(i, path).interval);
    ExtReal lhs = jnp_sum(f, towers, p);
    out.add(fk + ";partition=towers", ++index, lhs, rhs, lhs <= rhs, "tower intervals of levels <= 12");

    for (int pieces : {1, 4, 32, 256, 2048}) {
      std::vector<double> cuts{0.0, 1.0};
      std::uniform_real_distribution<double> u(0.0, 1.0);
      for (int c = 1; c < pieces; ++c) cuts.push_back(u(rng));
      std::sort(cuts.begin(), cuts.end());
      cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
      std::vector<Interval> part;
      for (std::size_t c = 1; c < cuts.size(); ++c) part.emplace_back(cuts[c - 1], cuts[c]);
      lhs = jnp_sum(f, part, p);
      out.add(fk + ";partition=random" + std::to_string(pieces), ++index, lhs, rhs, lhs <= rhs);
    }

    TowerSet small = TowerSet::build(Schedule::of(fam, p), std::min(prm.depth, 6));
    DpResult best = dp_max(small, p, candidate_grid(small, prm.refine));
    ExtReal small_rhs = ExtReal::exp2_real(p) * small.lp_mass(p);
    out.add(fk + ";partition=dp;dp_depth=" + std::to_string(small.depth()), ++index, best.value, small_rhs,
            best.value <= small_rhs, "search lower bound partition");
  }
  return out.take();
}

std::vector<ClaimReport> r2_infosc(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  TowerSet u = TowerSet::build(Schedule::u(prm.p), prm.depth);
  std::mt19937_64 rng(stream_seed(id, prm.seed));
  const double slack = std::exp2(-40);
  for (int k = 1; k <= 200; ++k) {
    Interval j = sample_interval(u, random_kind(rng), rng, 1, prm.depth - 1);
    ExtReal mean = mean_osc(u, j);
    ExtReal inf = inf_osc(u, j);
    ExtReal twice = inf * ExtReal(2.0);
    out.add("", k, mean, twice, le(inf, mean, slack) && le(mean, twice, slack),
            "lhs mean oscillation, rhs twice the infimum");
  }
  return out.take();
}

std::vector<ClaimReport> p26_perinterval(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  TowerSet u = TowerSet::build(Schedule::u(prm.p), prm.depth);
  std::mt19937_64 rng(stream_seed(id, prm.seed));
  for (int k = 1; k <= 200; ++k) {
    Interval j = sample_interval(u, random_kind(rng), rng, 1, prm.depth - 1);
    auto [lhs, rhs] = per_interval_q_monotonicity(u, j, prm.p, prm.q);
    out.add("", k, lhs, rhs, le(lhs, rhs, std::exp2(-30)));
  }
  return out.take();
}

// --- geometry and F(J) bounds for u and v ----------------------------------

std::vector<ClaimReport> l31_geom(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  TowerSet u = TowerSet::build(Schedule::u(p), prm.depth);
  // The truncated series over- or under-estimate delta and D by at most the
  // tail bound; the comparisons below use the conservative side.
  Coord tail = Coord(u.series_tail_bound()) + Coord::from_raw(1);
  const std::string note = "exact fixed point comparison, tail " + u.series_tail_bound().to_string();
  for (int i = 1; i <= prm.depth - 2; ++i) {
    const LevelData& L = u.level(i);
    const Coord& d = L.gap_c;
    const Coord& delta = L.inner_gap_c;
    const Coord& reach = L.reach_c;
    Coord delta_low = delta - tail;
    Coord reach_high = reach + tail;
    out.add("kind=half_d<=delta", i, d.half().to_ext(), delta_low.to_ext(), d.half() <= delta_low, note);
    out.add("kind=delta<=d", i, delta.to_ext(), d.to_ext(), delta <= d, note);
    out.add("kind=d<=D", i, d.to_ext(), reach.to_ext(), d <= reach, note);
    out.add("kind=D<=3d", i, reach_high.to_ext(), (3 * d).to_ext(), reach_high <= 3 * d, note);
    // b_i = (1 + i^(-1/p)) 2^(i^2/p), so b_i^p <= 2^p 2^(i^2) compares the factors.
    ExtReal factor = ExtReal::one() + pow_real(ExtReal(static_cast<double>(i)), -1.0 / p);
    ExtReal scale = ExtReal::pow2(static_cast<std::int64_t>(i) * i);
    ExtReal bp = pow_real(factor, p) * scale;
    ExtReal cap = pow_real(ExtReal(2.0), p) * scale;
    out.add("kind=b^p<=2^p*2^(i^2)", i, bp, cap, bp <= cap);
  }
  return out.take();
}

std::vector<ClaimReport> p32_diverge(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  TowerSet u = TowerSet::build(Schedule::u(p), prm.depth);
  auto levels = dyadic_level_sums(u, p);
  const ExtReal c = ExtReal::exp2_real(-1.25 - p);
  CompensatedSum cum;
  for (int i = 1; i <= prm.depth; ++i) {
    const ExtReal& term = levels[static_cast<std::size_t>(i)];
    ExtReal expect = c / ExtReal(static_cast<double>(i));
    out.add("kind=level", i, term, expect, close(term, expect, prm.tol));
    cum.add(term);
    ExtReal h = c * ExtReal(harmonic(i));
    out.add("kind=cumulative", i, cum.value(), h, close(cum.value(), h, prm.tol));
  }
  return out.take();
}

std::vector<ClaimReport> l34_l1(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p, q = prm.q;
  const double qd = q / (q - 1.0);
  TowerSet v = TowerSet::build(Schedule::u(p), prm.depth, p / q);
  std::map<int, ExtReal> tower_ratio, desc_ratio;
  for (int i = 1; i < prm.depth; ++i) {
    const LevelData& L = v.level(i);
    auto ii = static_cast<std::int64_t>(i);
    ExtReal own = L.node_mass;
    ExtReal rhs_own = ExtReal::exp2_scaled(-ii * ii, 1.0 / qd) * ExtReal::pow2(-ii);
    tower_ratio[i] = own / rhs_own;
    ExtReal desc = L.subtree_mass - L.node_mass;
    ExtReal rhs_desc = ExtReal::exp2_scaled(-(ii + 1) * (ii + 1), 1.0 / qd) * ExtReal::pow2(-ii);
    desc_ratio[i] = desc / rhs_desc;
  }
  // The ratios approach their limits from one side, so only the bound matters.
  growth_rows(out, "part=tower", tower_ratio, prm.window, 1, "ratio", false);
  growth_rows(out, "part=descendants", desc_ratio, prm.window, 1, "ratio", false);
  return out.take();
}

std::vector<ClaimReport> l35_taylor(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  std::vector<std::pair<double, double>> grid{{1.5, 2.0}, {2.0, 2.01}, {2.0, 3.0}, {3.0, 3.5}};
  if (prm.q > prm.p && std::find(grid.begin(), grid.end(), std::pair{prm.p, prm.q}) == grid.end())
    grid.emplace_back(prm.p, prm.q);
  std::int64_t k = 0;
  for (auto [p, q] : grid) {
    std::int64_t violations = 0, worst_i = 1;
    double worst = -1;
    ExtReal worst_l, worst_r;
    for (std::int64_t i = 1; i <= 10000; ++i) {
      auto [l, r] = taylor_check(i, p, q);
      if (r < l) ++violations;
      double ratio = (l / r).to_double();
      if (ratio > worst) {
        worst = ratio;
        worst_i = i;
        worst_l = l;
        worst_r = r;
      }
    }
    out.add("tp=" + num(p) + ";tq=" + num(q) + ";worst_i=" + std::to_string(worst_i), ++k, worst_l, worst_r,
            violations == 0, "violations " + std::to_string(violations) + " over i <= 10000");
  }
  return out.take();
}

struct FjSample {
  Interval j;
  FjBound b;
};

// The shared F(J) sample: 500 intervals cycling through the four classes
// around towers of levels 1..min(20, depth - 2), evaluated on v = u^(p/q).
std::vector<FjSample> fj_samples(const TowerSet& v, const Params& prm) {
  std::mt19937_64 rng(stream_seed("F(J) samples", prm.seed));
  const SampleKind kinds[] = {SampleKind::Contained, SampleKind::Short, SampleKind::Medium, SampleKind::Long};
  const int top = std::max(1, std::min(20, prm.depth - 2));
  std::vector<FjSample> out;
  for (int k = 0; k < 500; ++k) out.push_back({sample_interval(v, kinds[k % 4], rng, 1, top), {}});
  const auto n = static_cast<std::int64_t>(out.size());
  std::vector<std::exception_ptr> errs(out.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t k = 0; k < n; ++k) {
    try {
      auto& s = out[static_cast<std::size_t>(k)];
      s.b = fj_bound_check(v, s.j, prm.p, prm.q);
    } catch (...) {
      errs[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<ClaimReport> l37_fj(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  TowerSet v = TowerSet::build(Schedule::u(prm.p), prm.depth, prm.p / prm.q);
  auto samples = fj_samples(v, prm);
  std::map<int, ExtReal> level_max;
  std::int64_t k = 0;
  for (const auto& s : samples) {
    const FjBound& b = s.b;
    bool finite = b.rhs.sign() > 0 && std::isfinite(b.ratio);
    out.add("kind=sample;class=" + to_string(b.cls.cls) + ";level=" + std::to_string(b.cls.level), ++k, b.lhs,
            b.rhs, finite);
    if (b.rhs.sign() > 0) {
      ExtReal r = b.lhs / b.rhs;
      auto [it, fresh] = level_max.try_emplace(b.cls.level, r);
      if (!fresh) it->second = max(it->second, r);
    }
  }
  growth_rows(out, "", level_max, prm.window, 5, "max");
  return out.take();
}

// Carleson audit: random families of pairwise disjoint LONG intervals. The
// distinct anchors I_J must have total length sum 2^-i <= 1 and each anchor
// may serve at most two intervals; both checks are on integers.
void carleson_rows(Rows& out, const TowerSet& v, const Params& prm) {
  std::mt19937_64 rng(stream_seed("Carleson families", prm.seed));
  const int top = std::max(1, std::min(20, prm.depth - 2));
  const int depth = v.depth();
  for (int fam = 1; fam <= 20; ++fam) {
    std::vector<Interval> kept;
    std::map<std::pair<int, std::uint64_t>, int> anchors;
    for (int tries = 0; tries < 60; ++tries) {
      Interval j = sample_interval(v, SampleKind::Long, rng, 1, top);
      if (j.empty()) continue;
      bool clash = false;
      for (const auto& o : kept) clash = clash || overlaps(o, j);
      if (clash) continue;
      Classification c = classify(v, j);
      if (c.cls != OscClass::Long) continue;
      kept.push_back(j);
      ++anchors[{c.level, c.path}];
    }
    // |I| = 2^-i, scaled by 2^depth.
    std::uint64_t total = 0;
    int most = 0;
    std::int64_t nested = 0;
    for (const auto& [a, cnt] : anchors) {
      total += std::uint64_t{1} << (depth - a.first);
      most = std::max(most, cnt);
      for (const auto& [b, cnt2] : anchors) {
        (void)cnt2;
        if (b.first > a.first && (b.second >> (b.first - a.first)) == a.second) ++nested;
      }
    }
    std::uint64_t one = std::uint64_t{1} << depth;
    std::string note = std::to_string(kept.size()) + " intervals, " + std::to_string(anchors.size()) +
                       " anchors, " + std::to_string(nested) + " nested pairs, at most " +
                       std::to_string(most) + " per anchor";
    out.add("kind=carleson-total", fam, ExtReal(static_cast<double>(total)).ldexp(-depth), ExtReal::one(),
            total <= one, note);
    out.add("kind=carleson-per-anchor", fam, ExtReal(static_cast<double>(most)), ExtReal(2.0), most <= 2, note);
  }
}

ClaimFn fj_class_claim(OscClass cls, bool audit) {
  return [cls, audit](const std::string& id, const Params& prm) {
    Rows out(id, prm);
    TowerSet v = TowerSet::build(Schedule::u(prm.p), prm.depth, prm.p / prm.q);
    auto samples = fj_samples(v, prm);
    std::map<int, ExtReal> level_max;
    for (const auto& s : samples) {
      if (s.b.cls.cls != cls) continue;
      ExtReal r = s.b.lhs / s.b.class_rhs;
      auto [it, fresh] = level_max.try_emplace(s.b.cls.level, r);
      if (!fresh) it->second = max(it->second, r);
    }
    growth_rows(out, "class=" + to_string(cls), level_max, prm.window, 5, "max");
    if (audit) carleson_rows(out, v, prm);
    return out.take();
  };
}

// --- witnesses and modulus of g and g0 ------------------------------------

std::vector<ClaimReport> p43_witness(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  TowerSet g = TowerSet::build(Schedule::g(p), prm.depth);
  int k0 = cover_threshold(g);
  ExtReal avg = cover_average_ratio(g, k0);
  out.add("kind=threshold", k0, avg, ExtReal(0.75), avg <= ExtReal(0.75), "g_J / h_k at the minimal valid k");

  const ExtReal per = ExtReal::exp2_real(0.75 - 3 * p);
  const ExtReal level_bound = ExtReal::exp2_real(-0.25 - 3 * p);
  std::map<int, ExtReal> witness_sum;
  for (int k = k0; k <= std::min(20, prm.depth - 1); ++k) {
    auto terms = osc_terms(g, g.nodes_at(k), [&](std::uint64_t path) { return cover_interval(g, k, path); }, p);
    ExtReal lo = terms.front();
    for (const auto& t : terms) lo = min(lo, t);
    ExtReal sum = sum_compensated(terms);
    witness_sum[k] = sum;
    ExtReal bound = per * ExtReal::pow2(-k);
    out.add("kind=min-term;k=" + std::to_string(k), k, lo, bound, lo >= bound);
    out.add("kind=level-sum;k=" + std::to_string(k), k, sum, level_bound, sum >= level_bound);
  }

  ModulusSearch ms(g, p);
  for (int k = 2; k <= prm.depth - 2; ++k) {
    ModulusPoint pt = ms.at_level(k);
    std::string keys = "kind=modulus;k=" + std::to_string(k) + ";a=" + pt.cap.to_string();
    out.add(keys, k, pt.value, level_bound, pt.value >= level_bound, "search lower bound");
    auto w = witness_sum.lower_bound(k);
    if (w != witness_sum.end())
      out.add("kind=modulus-vs-witness;k=" + std::to_string(k) + ";witness_k=" + std::to_string(w->first), k,
              pt.value, w->second, pt.value >= w->second, "search lower bound against the cover witness");
  }
  return out.take();
}

std::vector<ClaimReport> p44_g0(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  const ExtReal c = ExtReal::exp2_real(-1.25);
  for (int n = 1; n <= prm.depth; ++n) {
    ExtReal mass = TowerSet::build(Schedule::g0(p), n).lp_mass(p);
    ExtReal expect = c * ExtReal(harmonic(n));
    out.add("kind=lp-mass;N=" + std::to_string(n), n, mass, expect, close(mass, expect, prm.tol));
  }

  TowerSet g0 = TowerSet::build(Schedule::g0(p), prm.depth);
  ModulusSearch ms(g0, p);
  std::map<int, ExtReal> value;
  std::map<int, ExtReal> fitted;
  for (int k = 2; k <= prm.depth - 2; ++k) {
    ModulusPoint pt = ms.at_level(k);
    value[k] = pt.value;
    out.add("kind=modulus;k=" + std::to_string(k) + ";a=" + pt.cap.to_string(), k, pt.value, pt.cap,
            pt.value.sign() > 0, "search lower bound");
    double shape = std::exp2(-k) + std::exp2((1.0 - p) * k) + 1.0 / k;
    fitted[k] = pt.value / ExtReal(shape);
  }
  for (auto it = std::next(value.begin()); it != value.end(); ++it) {
    if (it->first < 3) continue;
    const ExtReal& prev = std::prev(it)->second;
    out.add("kind=non-increasing;k=" + std::to_string(it->first), it->first, it->second, prev,
            it->second <= prev, "search lower bound");
  }
  if (value.count(3)) {
    int last = std::min(20, prm.depth - 2);
    ExtReal target = value[3] * ExtReal(0.1);
    out.add("kind=decay;k=" + std::to_string(last), last, value[last], target, value[last] <= target,
            "modulus at k=" + std::to_string(last) + " against 0.1 x modulus at k=3");
  }
  ExtReal med = median_of([&] {
    std::vector<ExtReal> v;
    for (const auto& [k, f] : fitted) v.push_back(f);
    return v;
  }());
  for (const auto& [k, f] : fitted) {
    bool ok = relative_difference(f, med) <= prm.window;
    out.add("kind=fit;k=" + std::to_string(k), k, f, med, ok,
            "value / (2^-k + 2^((1-p)k) + 1/k) against the median constant");
  }
  return out.take();
}

// --- extensions: auki, weak Lp, big cubes, products -----------------------

std::vector<ClaimReport> l510_auki(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  TowerSet g = TowerSet::build(Schedule::g(p), prm.depth);
  const Interval dom = g.domain();
  auto clip = [&](Coord a, Coord b) { return Interval(max(a, dom.start), min(b, dom.end)); };
  std::map<int, ExtReal> constant;
  const int last = std::min(18, prm.depth - 4);
  for (int n = 5; n <= last; ++n) {
    const Coord& a = g.level(n).inner_gap_c;
    ExtReal best;
    for (int m = n - 1; m <= n + 3; ++m) {
      const LevelData& L = g.level(m);
      for (std::uint64_t path : {std::uint64_t{0}, g.nodes_at(m) - 1}) {
        Coord t = g.node_start(m, path);
        Coord e = t + L.width_c;
        std::vector<Interval> cand;
        // Tight around the tower or its whole subtree; for p > 1 padding only
        // lowers the value.
        if (L.width_c <= a) cand.push_back(Interval(t, e));
        Interval hull = g.subtree_hull(m, path);
        if (hull.length() <= a) cand.push_back(hull);
        if (a <= L.width_c) {
          cand.push_back(Interval(t, t + a));
          cand.push_back(Interval(e - a, e));
        } else {
          Coord slack = a - L.width_c;
          cand.push_back(clip(t - slack, e));
          cand.push_back(clip(t, e + slack));
          cand.push_back(clip(t - slack.half(), e + slack.half()));
        }
        for (const auto& j : cand)
          if (!j.empty()) best = max(best, auki(g, j, p));
      }
    }
    constant[n] = best * ExtReal::pow2(n);
    out.add("kind=value;N=" + std::to_string(n), n, best, ExtReal::pow2(-n), best.sign() > 0,
            "max over candidates with |J| <= delta_N");
  }
  std::vector<ExtReal> cs;
  for (const auto& [n, c] : constant) cs.push_back(c);
  ExtReal med = median_of(cs);
  for (const auto& [n, c] : constant)
    out.add("kind=constant;N=" + std::to_string(n), n, c, med, relative_difference(c, med) <= prm.window,
            "C_N = value 2^N against the median");
  return out.take();
}

std::vector<ClaimReport> t52_weaklp(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  TowerSet g = TowerSet::build(Schedule::g(p), prm.depth);
  const Schedule& s = g.schedule();
  const ExtReal below(1.0 - std::exp2(-40));
  std::map<int, ExtReal> values;
  for (int i = 1; i <= std::min(20, prm.depth); ++i) {
    ExtReal t = s.roof_left(i) * below;
    std::vector<ExtReal> ts{t};
    ExtReal lhs = weak_lp(g, p, ts);
    CompensatedSum mass;
    for (int j = i; j <= prm.depth; ++j) mass.add(s.width(j).ldexp(j - 1));
    ExtReal rhs = pow_real(t, p) * mass.value();
    out.add("kind=level-set;i=" + std::to_string(i), i, lhs, rhs, close(lhs, rhs, prm.tol),
            "t = h_i (1 - 2^-40)");
    values[i] = lhs;
  }
  growth_rows(out, "", values, prm.window, 1, "weak", false);
  ExtReal hi, lo = values.begin()->second;
  for (const auto& [i, v] : values) {
    hi = max(hi, v);
    lo = min(lo, v);
  }
  out.add("kind=spread", 0, hi, lo, lo.sign() > 0 && std::isfinite(ratio_of(hi, lo)), "max against min");
  return out.take();
}

std::vector<ClaimReport> t57_bigcube(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const double p = prm.p;
  TowerSet u = TowerSet::build(Schedule::u(p), prm.depth);
  for (int n = 1; n <= 3; ++n) {
    std::vector<double> xs, ys;
    for (int k = 1; k <= 10; ++k) {
      ExtReal side = ExtReal::pow2(k);
      ExtReal val = big_cube_osc(u, side, n, p);
      out.add("kind=value;n=" + std::to_string(n) + ";side=2^" + std::to_string(k), k, val, side,
              val.sign() > 0);
      xs.push_back(k);
      ys.push_back(val.log2());
    }
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      mx += xs[k];
      my += ys[k];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sxy += (xs[k] - mx) * (ys[k] - my);
      sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    double slope = sxy / sxx;
    double expect = n * (1.0 / p - 1.0);
    out.add("kind=slope;n=" + std::to_string(n), n, ExtReal(slope), ExtReal(expect),
            std::abs(slope / expect - 1.0) <= 0.02, "least squares slope of log value against log side");
  }
  return out.take();
}

std::vector<ClaimReport> l58_product(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  TowerSet u = TowerSet::build(Schedule::u(prm.p), prm.depth);
  std::mt19937_64 rng(stream_seed(id, prm.seed));
  std::uniform_real_distribution<double> e(-20.0, 20.0);
  for (int k = 1; k <= 50; ++k) {
    Interval j = sample_interval(u, random_kind(rng), rng, 1, prm.depth - 1);
    ExtReal km = ExtReal::exp2_real(e(rng));
    auto [two_d, one_d] = product_reduction(u, j, km);
    out.add("", k, two_d, one_d, close(two_d, one_d, std::exp2(-35)));
  }
  return out.take();
}

// --- cross-checks ----------------------------------------------------------

std::vector<ClaimReport> opt_dpeqbf(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  std::mt19937_64 rng(stream_seed(id, prm.seed));
  const int depth = std::min(prm.depth, 6);
  for (int trial = 0; trial < 25; ++trial) {
    double p = trial % 2 ? prm.p : prm.q;
    TowerSet ts = TowerSet::build(Schedule::of(trial % 3 ? Family::U : Family::G, p), depth);
    auto nodes = ts.nodes();
    std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::pair<Coord, PointTag>> pts;
    const std::size_t size = 8 + static_cast<std::size_t>(trial % 7);
    while (pts.size() + 2 <= size) {
      const auto& n = nodes[pick(rng)];
      pts.emplace_back(n.interval.start, PointTag::TowerEdge);
      pts.emplace_back(u(rng) < 0.5 ? n.interval.end : Coord(u(rng)), PointTag::DyadicRefine);
    }
    BreakpointGrid grid = BreakpointGrid::from(std::move(pts));
    std::string keys = "trial=" + std::to_string(trial) + ";points=" + std::to_string(grid.size()) +
                       ";dp_depth=" + std::to_string(depth) + ";fp=" + num(p);
    ExtReal dp = dp_max(ts, p, grid).value;
    ExtReal bf = brute_force_max(ts, p, grid);
    out.add(keys + ";cap=none", 2 * trial, dp, bf, dp == bf);
    ExtReal cap = ts.gap_inner(2);
    ExtReal dpc = dp_max(ts, p, grid, cap).value;
    ExtReal bfc = brute_force_max(ts, p, grid, cap);
    out.add(keys + ";cap=delta_2", 2 * trial + 1, dpc, bfc, dpc == bfc);
  }
  return out.take();
}

std::vector<ClaimReport> orc_quad(const std::string& id, const Params& prm) {
  Rows out(id, prm);
  const int depth = std::min(prm.depth, 10);
  std::mt19937_64 rng(stream_seed(id, prm.seed));
  struct Case {
    std::string name;
    TowerSet ts;
  };
  std::vector<Case> cases{{"u", TowerSet::build(Schedule::u(prm.p), depth)},
                          {"g", TowerSet::build(Schedule::g(prm.p), depth)},
                          {"g0", TowerSet::build(Schedule::g0(prm.p), depth)},
                          {"v", TowerSet::build(Schedule::u(prm.p), depth, prm.p / prm.q)}};
  for (const auto& c : cases) {
    std::vector<Interval> js;
    for (int k = 0; k < 100; ++k) js.push_back(sample_interval(c.ts, random_kind(rng), rng, 1, depth));
    const auto n = static_cast<std::int64_t>(js.size());
    std::vector<std::array<ExtReal, 4>> vals(js.size());
    std::vector<std::exception_ptr> errs(js.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::int64_t k = 0; k < n; ++k) {
      try {
        const Interval& j = js[static_cast<std::size_t>(k)];
        auto& v = vals[static_cast<std::size_t>(k)];
        v[0] = c.ts.integral(j);
        v[1] = quad(c.ts, j);
        ExtReal mean = j.empty() ? ExtReal() : v[0] / j.measure();
        v[2] = c.ts.integral_abs_dev(j, mean);
        v[3] = quad_abs_dev(c.ts, j, mean);
      } catch (...) {
        errs[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
    std::string keys = "construction=" + c.name + ";quad_depth=" + std::to_string(depth);
    for (std::size_t k = 0; k < js.size(); ++k) {
      const auto& v = vals[k];
      auto idx = static_cast<std::int64_t>(k) + 1;
      out.add(keys + ";kind=integral", idx, v[0], v[1], close(v[0], v[1], 1e-6));
      out.add(keys + ";kind=abs-dev", idx, v[2], v[3], close(v[2], v[3], 1e-6));
    }
  }
  return out.take();
}

struct Entry {
  std::string id;
  std::string summary;
  ClaimFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"C2-POWERDECAY", "dyadic terms of x^(-1/p) are equal; t^p |{f > t}| = 1", c2_powerdecay},
      {"H2-HOELDER", "partition sums stay below 2^p times the L^p mass", h2_hoelder},
      {"R2-INFOSC", "infimum oscillation <= mean oscillation <= twice the infimum", r2_infosc},
      {"P26-PERINTERVAL", "per-interval term of u^(p/q) at exponent q <= term of u at p", p26_perinterval},
      {"L31-GEOM", "d/2 <= delta <= d <= D <= 3d and b^p <= 2^p 2^(i^2)", l31_geom},
      {"P32-DIVERGE", "tower witness of u: level sums 2^(-5/4-p)/i, harmonic partial sums", p32_diverge},
      {"L34-L1", "tower and descendant integrals of v against 2^(-i^2/q'-i)", l34_l1},
      {"L35-TAYLOR", "(1+x)^(p/q) - (1-x)^(p/q) <= 2x for x = i^(-1/p), i <= 10^4", l35_taylor},
      {"L37-FJ", "F(J) against the three-term bound on 500 intervals", l37_fj},
      {"P38-CONTAINED", "contained F(J) against |J| i^(-q/p) 2^(i^2)", fj_class_claim(OscClass::Contained, false)},
      {"P39-SHORT", "short F(J) against 2^-2i + 2^-i i^(-q/p)", fj_class_claim(OscClass::Short, false)},
      {"P310-MEDIUM", "medium F(J) against 2^-iq + 2^-2i + 2^-i i^(-q/p)", fj_class_claim(OscClass::Medium, false)},
      {"P311-LONG", "long F(J) against |I_J| and the Carleson audit of long anchors",
       fj_class_claim(OscClass::Long, true)},
      {"P43-WITNESS", "cover witnesses of g and the g modulus curve", p43_witness},
      {"P44-G0", "L^p mass of g0 is harmonic; g0 modulus decay", p44_g0},
      {"L510-AUKI", "sup |J|^(1-p) (int_J g)^p over |J| <= delta_N is about 2^-N", l510_auki},
      {"T52-WEAKLP", "t^p |{g > t}| at t just below h_i stays bounded", t52_weaklp},
      {"T57-BIGCUBE", "big cube oscillation decays like side^(n(1/p-1))", t57_bigcube},
      {"L58-PRODUCT", "mean oscillation over J x K equals that over J", l58_product},
      {"OPT-DPEQBF", "dp_max equals exhaustive search on small grids", opt_dpeqbf},
      {"ORC-QUAD", "closed forms against adaptive quadrature", orc_quad},
  };
  return r;
}

const Entry& find(const std::string& id) {
  for (const auto& e : registry())
    if (e.id == id) return e;
  std::string msg = "unknown claim '" + id + "'; registered:";
  for (const auto& e : registry()) msg += " " + e.id;
  throw UsageError(msg);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(x))
    throw UsageError("bad value for " + key + ": '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw UsageError("bad value for " + key + ": '" + v + "'");
  return x;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string Params::describe() const {
  return "p=" + num(p) + ";q=" + num(q) + ";depth=" + std::to_string(depth) + ";refine=" + std::to_string(refine) +
         ";seed=" + std::to_string(seed);
}

void Params::set(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "p") {
    p = parse_double(key, v);
  } else if (key == "q") {
    q = parse_double(key, v);
  } else if (key == "depth") {
    depth = static_cast<int>(parse_int(key, v));
  } else if (key == "refine") {
    refine = static_cast<int>(parse_int(key, v));
  } else if (key == "seed") {
    long long s = parse_int(key, v);
    if (s < 0) throw UsageError("seed must be nonnegative");
    seed = static_cast<std::uint64_t>(s);
  } else if (key == "tol") {
    tol = parse_double(key, v);
  } else if (key == "window") {
    window = parse_double(key, v);
  } else {
    throw UsageError("unknown parameter '" + key + "' (known: p q depth refine seed tol window)");
  }
}

void Params::load(std::istream& is) {
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key=value");
    set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

void Params::validate() const {
  if (!(p > 1.0)) throw UsageError("p must exceed 1");
  if (!(q >= p)) throw UsageError("q must be at least p");
  if (depth < 4 || depth > TowerSet::kMaxDepth)
    throw UsageError("depth must lie in [4, " + std::to_string(TowerSet::kMaxDepth) + "]");
  if (refine < 0) throw UsageError("refine must be nonnegative");
  if (!(tol > 0.0)) throw UsageError("tol must be positive");
  if (!(window > 0.0)) throw UsageError("window must be positive");
}

const std::vector<std::string>& claim_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : registry()) v.push_back(e.id);
    return v;
  }();
  return ids;
}

const std::string& claim_summary(const std::string& id) { return find(id).summary; }

std::vector<ClaimReport> run_claim(const std::string& id, const Params& params) {
  const Entry& e = find(id);
  params.validate();
  return e.fn(e.id, params);
}

std::vector<ClaimReport> run_claims(const std::vector<std::string>& ids, const Params& params) {
  for (const auto& id : ids) find(id);
  params.validate();
  std::vector<std::vector<ClaimReport>> parts(ids.size());
  std::vector<std::exception_ptr> errs(ids.size());
  const auto n = static_cast<std::int64_t>(ids.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t k = 0; k < n; ++k) {
    auto idx = static_cast<std::size_t>(k);
    try {
      parts[idx] = run_claim(ids[idx], params);
    } catch (...) {
      errs[idx] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  std::vector<ClaimReport> out;
  for (auto& part : parts)
    for (auto& r : part) out.push_back(std::move(r));
  return out;
}

const char* const kCsvHeader = "claim_id,param_set,index,lhs_sig,lhs_exp2,rhs_sig,rhs_exp2,ratio,pass";

void write_csv(std::ostream& os, const std::vector<ClaimReport>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.claim_id << ',' << r.param_set << ',' << r.index << ',' << fmt17(r.lhs.sign() * r.lhs.significand())
       << ',' << (r.lhs.is_zero() ? 0 : r.lhs.exp2()) << ',' << fmt17(r.rhs.sign() * r.rhs.significand()) << ','
       << (r.rhs.is_zero() ? 0 : r.rhs.exp2()) << ',' << fmt17(r.ratio) << ',' << (r.pass ? 1 : 0) << '\n';
  }
}

std::vector<ClaimReport> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kCsvHeader) throw UsageError("not a claims CSV: bad header");
  auto ext = [](const std::string& sig, const std::string& e) {
    double s = parse_double("significand", sig);
    long long x = parse_int("exp2", e);
    if (s == 0.0) return ExtReal();
    return ExtReal::compose(s < 0 ? -1 : 1, std::abs(s), x);
  };
  std::vector<ClaimReport> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 9) throw UsageError("CSV line " + std::to_string(lineno) + ": expected 9 fields");
    ClaimReport r;
    r.claim_id = f[0];
    r.param_set = f[1];
    r.index = parse_int("index", f[2]);
    r.lhs = ext(f[3], f[4]);
    r.rhs = ext(f[5], f[6]);
    r.ratio = f[7] == "inf" ? std::numeric_limits<double>::infinity() : parse_double("ratio", f[7]);
    if (f[8] != "0" && f[8] != "1") throw UsageError("CSV line " + std::to_string(lineno) + ": bad pass flag");
    r.pass = f[8] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ClaimTally> tally(const std::vector<ClaimReport>& rows) {
  std::vector<ClaimTally> out;
  for (const auto& r : rows) {
    if (out.empty() || out.back().claim_id != r.claim_id) out.push_back({r.claim_id, 0, 0});
    ++out.back().rows;
    if (!r.pass) ++out.back().failed;
  }
  return out;
}

}  // namespace jnp
