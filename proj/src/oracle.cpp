#include "jnp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "jnp/functional.hpp"

namespace jnp {

RefFunction::RefFunction(double p_) : p(p_) {
  if (!(p > 1.0)) throw PreconditionError("reference function needs p > 1");
}

ExtReal RefFunction::value(const ExtReal& x) const {
  if (x.sign() <= 0) throw std::domain_error("x^(-1/p) is singular at 0");
  return pow_real(x, -1.0 / p);
}

ExtReal RefFunction::antiderivative(const ExtReal& x) const {
  if (x.is_zero()) return x;
  return ExtReal(p / (p - 1.0)) * pow_real(x, 1.0 - 1.0 / p);
}

ExtReal RefFunction::osc_term(const ExtReal& a, const ExtReal& b) const {
  ExtReal len = b - a;
  ExtReal mean = (antiderivative(b) - antiderivative(a)) / len;
  // f decreases, so f > mean exactly on [a, x*) with x* = mean^-p.
  ExtReal cross = pow_real(mean, -p);
  ExtReal dev = ExtReal(2.0) * (antiderivative(cross) - antiderivative(a) - mean * (cross - a));
  return len * pow_real(dev / len, p);
}

ExtReal RefFunction::weak_lp_level(const ExtReal& t) const {
  if (t.sign() <= 0) throw PreconditionError("weak_lp_level: t must be positive");
  // f(x) > t iff x < t^-p.
  ExtReal lambda = min(ExtReal::one(), pow_real(t, -p));
  return pow_real(t, p) * lambda;
}

namespace {

using Sampler = std::function<ExtReal(const Coord&)>;

struct Node {
  Coord a, b;
  ExtReal fa, fm, fb, whole;
};

ExtReal simpson3(const Coord& a, const Coord& b, const ExtReal& fa, const ExtReal& fm,
                 const ExtReal& fb) {
  return (fa + ExtReal(4.0) * fm + fb) * (b - a).to_ext() / ExtReal(6.0);
}

// Adaptive Simpson: split until the two halves agree with the whole within eps
// or within tol of their own size, then keep the Richardson-corrected halves.
ExtReal adapt(const Sampler& g, const Node& n, const ExtReal& eps, int depth, const QuadOptions& opt) {
  Coord m = n.a + (n.b - n.a).half();
  Coord lm = n.a + (m - n.a).half();
  Coord rm = m + (n.b - m).half();
  ExtReal flm = g(lm), frm = g(rm);
  ExtReal left = simpson3(n.a, m, n.fa, flm, n.fm);
  ExtReal right = simpson3(m, n.b, n.fm, frm, n.fb);
  ExtReal both = left + right;
  ExtReal diff = both - n.whole;
  if (abs(diff) <= max(ExtReal(15.0) * eps, abs(both) * ExtReal(opt.tol)))
    return both + diff / ExtReal(15.0);
  if (depth >= opt.max_depth)
    throw AccuracyError("quadrature did not settle on a piece of length " + (n.b - n.a).to_string());
  ExtReal half_eps = eps.ldexp(-1);
  return adapt(g, {n.a, m, n.fa, flm, n.fm, left}, half_eps, depth + 1, opt) +
         adapt(g, {m, n.b, n.fm, frm, n.fb, right}, half_eps, depth + 1, opt);
}

// f is continuous inside a piece but pieces are half-open, so the right end
// is sampled one unit of the fixed-point grid to its left.
Node make_node(const Sampler& g, const Coord& a, const Coord& b) {
  Node n{a, b, g(a), g(a + (b - a).half()), g(b - Coord::from_raw(1)), {}};
  n.whole = simpson3(a, b, n.fa, n.fm, n.fb);
  return n;
}

ExtReal settle_piece(const Sampler& g, const Coord& a, const Coord& b, const QuadOptions& opt) {
  Node n = make_node(g, a, b);
  ExtReal scale = abs(n.whole);
  if (scale.is_zero()) scale = max(abs(n.fa), max(abs(n.fm), abs(n.fb))) * (b - a).to_ext();
  return adapt(g, n, scale * ExtReal(opt.tol), 0, opt);
}

ExtReal integrate(const TowerSet& f, const Interval& j, const Sampler& g, const QuadOptions& opt) {
  if (!(opt.tol > 0.0)) throw PreconditionError("quad: tol must be positive");
  std::vector<Coord> cuts{j.start, j.end};
  f.for_each_node([&](const TowerNode& n) {
    if (j.start < n.interval.start && n.interval.start < j.end) cuts.push_back(n.interval.start);
    if (j.start < n.interval.end && n.interval.end < j.end) cuts.push_back(n.interval.end);
  });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Node> pieces;
  CompensatedSum coarse;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    pieces.push_back(make_node(g, cuts[k], cuts[k + 1]));
    coarse.add(abs(pieces.back().whole));
  }
  // The error budget is shared out by length.
  ExtReal eps = coarse.value() * ExtReal(opt.tol) / j.measure();
  CompensatedSum acc;
  for (const auto& n : pieces) {
    if (n.whole.is_zero() && n.fa.is_zero() && n.fb.is_zero()) continue;
    acc.add(adapt(g, n, eps * (n.b - n.a).to_ext(), 0, opt));
  }
  return acc.value();
}

}  // namespace

ExtReal quad(const TowerSet& f, const Interval& j, QuadOptions opt) {
  return integrate(f, j, [&f](const Coord& x) { return f.eval(x); }, opt);
}

ExtReal quad_abs_dev(const TowerSet& f, const Interval& j, const ExtReal& c, QuadOptions opt) {
  return integrate(f, j, [&f, &c](const Coord& x) { return abs(f.eval(x) - c); }, opt);
}

ExtReal quad(const RefFunction& f, double a, double b, QuadOptions opt) {
  if (!(0.0 <= a && a <= b && b <= 1.0)) throw PreconditionError("quad: need 0 <= a <= b <= 1");
  if (a == b) return ExtReal();
  Sampler g = [&f](const Coord& x) { return f.value(x.to_ext()); };
  if (a > 0.0) return settle_piece(g, Coord(a), Coord(b), opt);
  // Pieces [b 2^-(k+1), b 2^-k] shrink geometrically; stop once the
  // extrapolated tail is below tol of the running total.
  CompensatedSum acc;
  ExtReal last;
  Coord hi(b);
  for (int k = 0; k < 4000; ++k) {
    Coord lo = hi.half();
    ExtReal piece = settle_piece(g, lo, hi, opt);
    acc.add(piece);
    if (k > 0) {
      ExtReal ratio = piece / last;
      if (ratio < ExtReal::one()) {
        ExtReal tail = piece * ratio / (ExtReal::one() - ratio);
        if (tail <= acc.value() * ExtReal(opt.tol)) {
          acc.add(tail);
          return acc.value();
        }
      }
    }
    last = piece;
    hi = lo;
  }
  throw AccuracyError("quad: singular tail did not settle");
}

ExtReal brute_force_max(const BreakpointGrid& grid, const WeightFn& weight,
                        const std::optional<Coord>& cap) {
  const std::size_t n = grid.size();
  if (n > 16) throw std::length_error("brute_force_max: more than 16 grid points");
  std::vector<std::vector<std::optional<ExtReal>>> w(n, std::vector<std::optional<ExtReal>>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (!cap || grid.points[b] - grid.points[a] <= *cap)
        w[a][b] = weight(Interval(grid.points[a], grid.points[b]));

  ExtReal best;
  // Every selection is a chain a1 < b1 <= a2 < b2 <= ...; walk them all.
  std::function<void(std::size_t, const ExtReal&)> go = [&](std::size_t from, const ExtReal& acc) {
    best = max(best, acc);
    for (std::size_t a = from; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (w[a][b]) go(b, acc + *w[a][b]);
  };
  go(0, ExtReal());
  return best;
}

ExtReal brute_force_max(const TowerSet& f, double p, const BreakpointGrid& grid,
                        const std::optional<ExtReal>& max_len) {
  std::optional<Coord> cap;
  if (max_len) cap = Coord(*max_len);
  return brute_force_max(grid, [&f, p](const Interval& j) { return osc_term(f, j, p); }, cap);
}

std::vector<ExtReal> ref_dyadic_terms(double p, int count) {
  if (count < 1) throw PreconditionError("ref_dyadic_terms: count must be positive");
  RefFunction f(p);
  std::vector<ExtReal> out;
  for (int i = 1; i <= count; ++i) out.push_back(f.osc_term(ExtReal::pow2(-i), ExtReal::pow2(1 - i)));
  return out;
}

}  // namespace jnp
