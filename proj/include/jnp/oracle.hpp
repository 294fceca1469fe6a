#pragma once

#include <optional>
#include <vector>

#include "jnp/errors.hpp"
#include "jnp/optimizer.hpp"
#include "jnp/towers.hpp"

namespace jnp {

/// x^(-1/p) on (0, 1].
struct RefFunction {
  double p;

  explicit RefFunction(double p);
  ExtReal value(const ExtReal& x) const;
  /// (p / (p - 1)) x^(1 - 1/p).
  ExtReal antiderivative(const ExtReal& x) const;
  /// |Q| (mean |f - f_Q| over Q)^p for Q = [a, b] inside (0, 1].
  ExtReal osc_term(const ExtReal& a, const ExtReal& b) const;
  /// t^p |{x in (0,1] : f(x) > t}|.
  ExtReal weak_lp_level(const ExtReal& t) const;
};

struct QuadOptions {
  double tol = 1e-9;
  int max_depth = 60;
};

/// Adaptive Simpson on every piece between consecutive tower endpoints inside
/// J, splitting until the halves agree with the whole within tol of a coarse
/// estimate of the total. Throws AccuracyError past max_depth splits.
ExtReal quad(const TowerSet& f, const Interval& j, QuadOptions opt = {});
/// Same for |f - c|.
ExtReal quad_abs_dev(const TowerSet& f, const Interval& j, const ExtReal& c, QuadOptions opt = {});
/// Integral of x^(-1/p) over [a, b] inside [0, 1]; the singular end is handled
/// by dyadic splitting with a geometric tail estimate.
ExtReal quad(const RefFunction& f, double a, double b, QuadOptions opt = {});

/// Exhaustive search over every choice of disjoint grid intervals. Terms are
/// added left to right, the order the DP uses. Throws std::length_error for
/// more than 16 points.
ExtReal brute_force_max(const TowerSet& f, double p, const BreakpointGrid& grid,
                        const std::optional<ExtReal>& max_len = std::nullopt);
/// The same search for an arbitrary weight; used to cross-check dp_solve.
ExtReal brute_force_max(const BreakpointGrid& grid, const WeightFn& weight,
                        const std::optional<Coord>& cap);

/// Terms of x^(-1/p) over Q_i = [2^-i, 2^(1-i)] for i = 1..count.
std::vector<ExtReal> ref_dyadic_terms(double p, int count);

}  // namespace jnp
