#include "jnp/roof.hpp"

#include <cmath>

namespace jnp::roof {

double power_excess(double w, double m) {
  if (std::fabs(w) < 1e-3) {
    // sum_{n>=2} C(m, n) w^n / m
    double binom = m * (m - 1.0) / 2.0;
    double wn = w * w;
    double total = 0.0;
    for (int n = 2; n <= 12; ++n) {
      total += binom * wn;
      binom *= (m - n) / (n + 1.0);
      wn *= w;
    }
    return total / m;
  }
  if (w <= -1.0) return (m - 1.0) / m;
  return (std::expm1(m * std::log1p(w)) - m * w) / m;
}

ExtReal rpow(const ExtReal& y, double r) {
  if (y.is_zero() || r == 1.0) return y;
  return pow_real(y, r);
}

ExtReal integral(const ExtReal& y0, const ExtReal& dy, const ExtReal& len, double r) {
  if (len.is_zero()) return ExtReal();
  if (r == 1.0) return len * (y0 + dy.ldexp(-1));
  if (dy.is_zero()) return len * rpow(y0, r);
  ExtReal y1 = y0 + dy;
  ExtReal big = max(y0, y1);
  double v = (abs(dy) / big).to_double();
  double shape = v >= 1.0 ? 1.0 / (r + 1.0) : -std::expm1((r + 1.0) * std::log1p(-v)) / ((r + 1.0) * v);
  return len * rpow(big, r) * ExtReal(shape);
}

ExtReal abs_dev(const ExtReal& y0, const ExtReal& dy, const ExtReal& len, double r,
                const ExtReal& c) {
  if (len.is_zero()) return ExtReal();
  if (c.is_zero()) return integral(y0, dy, len, r);
  if (r == 1.0) {
    ExtReal start = y0 - c;
    ExtReal stop = start + dy;
    if (start.sign() * stop.sign() >= 0) return len * abs(start + dy.ldexp(-1));
    return len * (start * start + stop * stop) / abs(dy).ldexp(1);
  }
  ExtReal y1 = y0 + dy;
  ExtReal lo = min(y0, y1);
  ExtReal hi = max(y0, y1);
  if (c <= rpow(lo, r)) return integral(y0, dy, len, r) - c * len;
  if (c >= rpow(hi, r)) return c * len - integral(y0, dy, len, r);
  ExtReal cross = pow_real(c, 1.0 / r);
  cross = min(max(cross, lo), hi);
  double above = ((hi - cross) / cross).to_double();
  double below = ((cross - lo) / cross).to_double();
  double shape = power_excess(above, r + 1.0) + power_excess(-below, r + 1.0);
  return len / abs(dy) * c * cross * ExtReal(shape);
}

ExtReal measure_above(const ExtReal& y0, const ExtReal& dy, const ExtReal& len, double r,
                      const ExtReal& t) {
  if (len.is_zero()) return ExtReal();
  ExtReal level = t.is_zero() ? t : (r == 1.0 ? t : pow_real(t, 1.0 / r));
  ExtReal y1 = y0 + dy;
  ExtReal lo = min(y0, y1);
  ExtReal hi = max(y0, y1);
  if (hi <= level) return ExtReal();
  if (lo > level || dy.is_zero()) return len;
  return len * (hi - level) / abs(dy);
}

}  // namespace jnp::roof
