#include "jnp/functional.hpp"

#include <algorithm>
#include <cmath>

#include "jnp/roof.hpp"

namespace jnp {

namespace {

// x^p with 0^p = 0.
ExtReal ppow(const ExtReal& x, double p) {
  if (x.is_zero()) return x;
  return pow_real(x, p);
}

void require_positive_length(const Interval& j) {
  if (j.empty()) throw std::domain_error("oscillation over an interval of zero length");
}

}  // namespace

std::string to_string(OscClass c) {
  switch (c) {
    case OscClass::None: return "none";
    case OscClass::Contained: return "contained";
    case OscClass::Short: return "short";
    case OscClass::Medium: return "medium";
    case OscClass::Long: return "long";
  }
  return "?";
}

ExtReal mean_osc(const TowerSet& f, const Interval& j) {
  require_positive_length(j);
  return mean_osc(f, f.cover(j));
}

ExtReal mean_osc(const TowerSet& f, const Cover& cov) {
  require_positive_length(cov.span);
  const ExtReal& len = cov.measure;
  ExtReal avg = f.integral(cov) / len;
  return f.integral_abs_dev(cov, avg) / len;
}

ExtReal inf_osc(const TowerSet& f, const Interval& j) {
  require_positive_length(j);
  Cover cov = f.cover(j);
  ExtReal len = j.measure();
  ExtReal at_median = f.integral_abs_dev(cov, f.median(cov));
  ExtReal at_mean = f.integral_abs_dev(cov, f.integral(cov) / len);
  return min(at_median, at_mean) / len;
}

ExtReal osc_term(const TowerSet& f, const Cover& cov, double p) {
  return cov.measure * ppow(mean_osc(f, cov), p);
}

ExtReal osc_term(const TowerSet& f, const Interval& j, double p) {
  require_positive_length(j);
  return osc_term(f, f.cover(j), p);
}

ExtReal osc_term(const TowerSet& f, const TowerNode& n, double p) {
  const LevelData& L = f.level(n.level);
  ExtReal avg = L.node_mass / L.width;
  ExtReal dev = roof::abs_dev(L.left, L.right - L.left, L.width, f.power(), avg);
  return L.width * ppow(dev / L.width, p);
}

OscTerm evaluate_term(const TowerSet& f, const Interval& j, double p) {
  require_positive_length(j);
  OscTerm t;
  t.interval = j;
  Cover cov = f.cover(j);
  t.mean_osc = mean_osc(f, cov);
  t.term = j.measure() * ppow(t.mean_osc, p);
  t.cls = classify(f, j);
  return t;
}

void require_disjoint(std::span<const Interval> partition) {
  std::vector<Interval> sorted(partition.begin(), partition.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& a, const Interval& b) { return a.start < b.start; });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (overlaps(sorted[k - 1], sorted[k]))
      throw PreconditionError("partition intervals overlap at " + sorted[k].start.to_string());
  }
}

std::vector<ExtReal> osc_terms(const TowerSet& f, std::uint64_t count, const IntervalGen& make, double p) {
  std::vector<ExtReal> out(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t k = 0; k < n; ++k) {
    Interval j = make(static_cast<std::uint64_t>(k));
    if (!j.empty()) out[static_cast<std::size_t>(k)] = osc_term(f, j, p);
  }
  return out;
}

std::vector<ExtReal> osc_terms_serial(const TowerSet& f, std::uint64_t count, const IntervalGen& make,
                                      double p) {
  std::vector<ExtReal> out(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    Interval j = make(k);
    if (!j.empty()) out[k] = osc_term(f, j, p);
  }
  return out;
}

ExtReal jnp_sum(const TowerSet& f, std::span<const Interval> partition, double p) {
  require_disjoint(partition);
  auto terms = osc_terms(f, partition.size(), [&](std::uint64_t k) { return partition[k]; }, p);
  return sum_compensated(terms);
}

Classification classify(const TowerSet& f, const Interval& j) {
  Classification c;
  Cover cov = f.cover(j);
  if (!cov.touches_towers()) return c;
  int best_level = f.depth() + 1;
  std::uint64_t best_path = 0;
  int count = 0;
  auto consider = [&](int level, std::uint64_t path) {
    if (level < best_level) {
      best_level = level;
      best_path = path;
      count = 1;
    } else if (level == best_level) {
      best_path = std::min(best_path, path);
      ++count;
    }
  };
  for (const auto& [lvl, path] : cov.full_roots) consider(lvl, path);
  for (const auto& pc : cov.pieces) consider(pc.level, pc.path);

  c.level = best_level;
  c.path = best_path;
  c.ties = count - 1;
  c.inside = f.level(best_level).width_c;
  for (const auto& pc : cov.pieces) {
    if (pc.level == best_level && pc.path == best_path) c.inside = pc.length_c;
  }
  c.outside = j.length() - c.inside;
  const LevelData& L = f.level(best_level);
  if (c.outside.is_zero()) {
    c.cls = OscClass::Contained;
  } else if (c.outside <= L.inner_gap_c) {
    c.cls = OscClass::Short;
  } else if (c.outside <= 2 * L.reach_c) {
    c.cls = OscClass::Medium;
  } else {
    c.cls = OscClass::Long;
  }
  return c;
}

FjBound fj_bound_check(const TowerSet& v, const Interval& j, double p, double q) {
  FjBound b;
  b.cls = classify(v, j);
  if (b.cls.cls == OscClass::None)
    throw PreconditionError("fj_bound_check: J meets no tower");
  Cover cov = v.cover(j);
  b.lhs = osc_term(v, cov, q);

  const int i = b.cls.level;
  ExtReal len = j.measure();
  ExtReal outside = b.cls.outside.to_ext();
  ExtReal inside = b.cls.inside.to_ext();
  ExtReal out_mass = v.integral_excluding(cov, i, b.cls.path);
  b.outside_term = out_mass.is_zero() ? ExtReal() : pow_real(len, 1.0 - q) * pow_real(out_mass, q);
  ExtReal bp = pow_real(v.schedule().roof_right(i), p);
  b.mixed_term = min(outside, inside) * bp;
  ExtReal level_scale = ExtReal(std::pow(static_cast<double>(i), -q / p)) *
                        ExtReal::pow2(static_cast<std::int64_t>(i) * i);
  b.inside_term = inside * level_scale;
  b.rhs = b.outside_term + b.mixed_term + b.inside_term;
  b.ratio = (b.lhs / b.rhs).to_double();

  ExtReal two_i = ExtReal::pow2(-i);
  ExtReal two_2i = ExtReal::pow2(-2 * i);
  ExtReal iq = ExtReal(std::pow(static_cast<double>(i), -q / p));
  switch (b.cls.cls) {
    case OscClass::Contained: b.class_rhs = len * level_scale; break;
    case OscClass::Short: b.class_rhs = two_2i + two_i * iq; break;
    case OscClass::Medium: b.class_rhs = ExtReal::exp2_real(-q * i) + two_2i + two_i * iq; break;
    case OscClass::Long: b.class_rhs = two_i; break;
    case OscClass::None: break;
  }
  return b;
}

ExtReal vjn_modulus_terms(const TowerSet& f, const ExtReal& a, std::span<const Interval> partition,
                          double p) {
  for (const auto& j : partition) {
    if (j.measure() > a)
      throw PreconditionError("vjn_modulus_terms: interval of length " + j.measure().to_string() +
                              " exceeds the cap " + a.to_string());
  }
  return jnp_sum(f, partition, p);
}

ExtReal auki(const TowerSet& f, const Interval& j, double p) {
  require_positive_length(j);
  ExtReal mass = f.integral(j);
  if (mass.is_zero()) return mass;
  return pow_real(j.measure(), 1.0 - p) * pow_real(mass, p);
}

ExtReal big_cube_osc(const TowerSet& f, const ExtReal& side, int n_dims, double p) {
  if (n_dims < 1) throw PreconditionError("big_cube_osc: dimension must be >= 1");
  if (side < ExtReal::one())
    throw PreconditionError("big_cube_osc: a cube of side " + side.to_string() +
                            " cannot contain the unit support box");
  Cover cov = f.cover(f.domain());
  ExtReal f_unit = f.integral(cov);  // the unit interval has measure 1
  // f - f_I integrates to zero, so its extension has average zero over every
  // cube containing the support box and the deviation lives on [0,1]^n.
  ExtReal dev = f.integral_abs_dev(cov, f_unit);
  if (dev.is_zero()) return dev;
  ExtReal volume = pow_real(side, static_cast<double>(n_dims));
  return pow_real(volume, 1.0 / p - 1.0) * dev;
}

std::pair<ExtReal, ExtReal> product_reduction(const TowerSet& f, const Interval& j,
                                              const ExtReal& k_measure) {
  require_positive_length(j);
  if (k_measure.sign() <= 0) throw PreconditionError("product_reduction: |K| must be positive");
  Cover cov = f.cover(j);
  ExtReal area = j.measure() * k_measure;
  // Fubini over J x K with f constant along K.
  ExtReal mass = f.integral(cov) * k_measure;
  ExtReal avg = mass / area;
  ExtReal dev = f.integral_abs_dev(cov, avg) * k_measure;
  return {dev / area, mean_osc(f, cov)};
}

ExtReal weak_lp(const TowerSet& f, double p, std::span<const ExtReal> t_samples) {
  ExtReal best;
  Cover all = f.cover(f.domain());
  for (const auto& t : t_samples) {
    if (t.sign() <= 0) throw PreconditionError("weak_lp: sample levels must be positive");
    ExtReal lam = f.measure_above(all, t);
    if (lam.is_zero()) continue;
    best = max(best, pow_real(t, p) * lam);
  }
  return best;
}

std::pair<ExtReal, ExtReal> per_interval_q_monotonicity(const TowerSet& u, const Interval& j,
                                                        double p, double q) {
  if (q < p) throw PreconditionError("per_interval_q_monotonicity: needs q >= p");
  if (u.power() != 1.0) throw PreconditionError("per_interval_q_monotonicity: u must have power 1");
  require_positive_length(j);
  ExtReal len = j.measure();
  ExtReal rhs = len * ppow(inf_osc(u, j), p);
  if (q == p) return {rhs, rhs};
  TowerSet v = u.with_power(p / q);
  ExtReal lhs = len * ppow(inf_osc(v, j), q);
  return {lhs, rhs};
}

std::pair<ExtReal, ExtReal> taylor_check(std::int64_t i, double p, double q) {
  if (i < 1) throw PreconditionError("taylor_check: i must be >= 1");
  if (!(1.0 < p && p < q)) throw PreconditionError("taylor_check: needs 1 < p < q");
  double x = std::pow(static_cast<double>(i), -1.0 / p);
  double r = p / q;
  // (1+x)^r - (1-x)^r as a difference of expm1 terms, which stays accurate for small x.
  double up = std::expm1(r * std::log1p(x));
  double down = x >= 1.0 ? -1.0 : std::expm1(r * std::log1p(-x));
  return {ExtReal(up - down), ExtReal(2.0 * x)};
}

}  // namespace jnp
