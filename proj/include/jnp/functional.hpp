#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jnp/errors.hpp"
#include "jnp/towers.hpp"

namespace jnp {

enum class OscClass { None, Contained, Short, Medium, Long };

std::string to_string(OscClass c);

/// Anchor of an interval J: the widest tower met by J (leftmost on ties).
struct Classification {
  OscClass cls = OscClass::None;
  int level = 0;
  std::uint64_t path = 0;
  Coord outside;  // |J \ I_J|
  Coord inside;   // |J cap I_J|
  int ties = 0;   // other towers of the anchor level met by J
};

struct OscTerm {
  Interval interval;
  ExtReal mean_osc;
  ExtReal term;  // |J| * mean_osc^p
  Classification cls;
};

/// Mean oscillation of f over J, computed as integral_abs_dev(J, f_J) / |J|.
ExtReal mean_osc(const TowerSet& f, const Interval& j);
ExtReal mean_osc(const TowerSet& f, const Cover& cov);

/// inf_c of the mean deviation; the minimum over c in {median, f_J}.
ExtReal inf_osc(const TowerSet& f, const Interval& j);

/// F(J) = |J| * mean_osc(J)^p.
ExtReal osc_term(const TowerSet& f, const Interval& j, double p);
ExtReal osc_term(const TowerSet& f, const Cover& cov, double p);
/// Term of a single tower interval, from the level's closed forms.
ExtReal osc_term(const TowerSet& f, const TowerNode& n, double p);
OscTerm evaluate_term(const TowerSet& f, const Interval& j, double p);

/// F(make(k)) for k < count, evaluated in parallel; the result does not depend
/// on the thread count.
using IntervalGen = std::function<Interval(std::uint64_t)>;
std::vector<ExtReal> osc_terms(const TowerSet& f, std::uint64_t count, const IntervalGen& make, double p);
std::vector<ExtReal> osc_terms_serial(const TowerSet& f, std::uint64_t count, const IntervalGen& make,
                                      double p);

/// Sum of F(J) over pairwise disjoint intervals; overlaps raise PreconditionError.
ExtReal jnp_sum(const TowerSet& f, std::span<const Interval> partition, double p);

/// Throws PreconditionError if two intervals of the list overlap.
void require_disjoint(std::span<const Interval> partition);

Classification classify(const TowerSet& f, const Interval& j);

/// Lemma-style bound for v = u^(p/q): F(J) against
/// |J|^(1-q) (int_{J\I} v)^q + min(|J\I|, |J cap I|) b_i^p + |J cap I| i^(-q/p) 2^(i^2).
struct FjBound {
  Classification cls;
  ExtReal lhs;
  ExtReal outside_term, mixed_term, inside_term;
  ExtReal rhs;
  double ratio = 0.0;
  /// Class specific comparison quantity without constant: |J| i^(-q/p) 2^(i^2)
  /// (contained), 2^-2i + 2^-i i^(-q/p) (short), 2^-iq + 2^-2i + 2^-i i^(-q/p)
  /// (medium) or |I_J| = 2^-i (long).
  ExtReal class_rhs;
};
FjBound fj_bound_check(const TowerSet& v, const Interval& j, double p, double q);

/// jnp_sum of a partition whose intervals all have length <= a.
ExtReal vjn_modulus_terms(const TowerSet& f, const ExtReal& a, std::span<const Interval> partition,
                          double p);

/// |J|^(1-p) (int_J |f|)^p.
ExtReal auki(const TowerSet& f, const Interval& j, double p);

/// |Q|^(1/p) times the mean oscillation over a cube Q of side `side` containing
/// the unit cube, for the extension of f - f_[0,1] by zero to R^n.
ExtReal big_cube_osc(const TowerSet& f, const ExtReal& side, int n_dims, double p);

/// (mean oscillation of f(x) over J x K computed in two dimensions, mean_osc(f, J)).
std::pair<ExtReal, ExtReal> product_reduction(const TowerSet& f, const Interval& j,
                                              const ExtReal& k_measure);

/// max over samples of t^p |{f > t}|.
ExtReal weak_lp(const TowerSet& f, double p, std::span<const ExtReal> t_samples);

/// (|J| inf_osc(u^(p/q), J)^q, |J| inf_osc(u, J)^p) for a power-one u.
std::pair<ExtReal, ExtReal> per_interval_q_monotonicity(const TowerSet& u, const Interval& j,
                                                        double p, double q);

/// ((1 + x)^(p/q) - (1 - x)^(p/q), 2x) with x = i^(-1/p).
std::pair<ExtReal, ExtReal> taylor_check(std::int64_t i, double p, double q);

}  // namespace jnp
