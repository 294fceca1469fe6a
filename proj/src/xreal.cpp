#include "jnp/xreal.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace jnp {

namespace {

// Operands whose exponents differ by more than this are absorbed by the larger.
constexpr std::int64_t kAbsorbGap = 60;

}  // namespace

ExtReal::ExtReal(double x) {
  if (!std::isfinite(x)) throw std::domain_error("ExtReal: non-finite input");
  if (x == 0.0) return;
  *this = compose(x < 0 ? -1 : 1, std::fabs(x), 0);
}

ExtReal ExtReal::compose(int sign, double significand, std::int64_t exp2) {
  if (sign < -1 || sign > 1) throw std::domain_error("ExtReal: bad sign");
  if (!std::isfinite(significand) || significand < 0.0)
    throw std::domain_error("ExtReal: bad significand");
  ExtReal r;
  if (sign == 0 || significand == 0.0) return r;
  r.sign_ = sign;
  // Products and sums of normalized values mostly land in [1, 4).
  if (significand >= 1.0 && significand < 2.0) {
    r.sig_ = significand;
    r.exp2_ = exp2;
    return r;
  }
  if (significand >= 2.0 && significand < 4.0) {
    r.sig_ = significand * 0.5;
    r.exp2_ = exp2 + 1;
    return r;
  }
  int e = 0;
  double m = std::frexp(significand, &e);  // m in [0.5, 1)
  r.sign_ = sign;
  r.sig_ = m * 2.0;
  r.exp2_ = exp2 + static_cast<std::int64_t>(e) - 1;
  return r;
}

ExtReal ExtReal::exp2_real(double x) {
  if (!std::isfinite(x)) throw std::domain_error("exp2_real: non-finite exponent");
  double n = std::floor(x);
  double frac = x - n;
  return compose(1, std::exp2(frac), static_cast<std::int64_t>(n));
}

ExtReal ExtReal::exp2_scaled(std::int64_t n, double r) {
  // n * r = hi + lo exactly (n is exactly representable for |n| < 2^53).
  double nd = static_cast<double>(n);
  double hi = nd * r;
  double lo = std::fma(nd, r, -hi);
  double ip = std::floor(hi);
  double frac = (hi - ip) + lo;
  double ip2 = std::floor(frac);
  frac -= ip2;
  return compose(1, std::exp2(frac), static_cast<std::int64_t>(ip) + static_cast<std::int64_t>(ip2));
}

ExtReal ExtReal::exp2_ratio(std::int64_t n, double d) {
  if (d == 0.0 || !std::isfinite(d)) throw std::domain_error("exp2_ratio: bad divisor");
  double nd = static_cast<double>(n);
  double hi = nd / d;
  double lo = std::fma(-hi, d, nd) / d;
  double ip = std::floor(hi);
  double frac = (hi - ip) + lo;
  double ip2 = std::floor(frac);
  frac -= ip2;
  return compose(1, std::exp2(frac), static_cast<std::int64_t>(ip) + static_cast<std::int64_t>(ip2));
}

double ExtReal::to_double() const {
  if (sign_ == 0) return 0.0;
  if (exp2_ > 1100) return sign_ * HUGE_VAL;
  if (exp2_ < -1200) return sign_ * 0.0;
  return sign_ * std::ldexp(sig_, static_cast<int>(exp2_));
}

double ExtReal::log2() const {
  if (sign_ == 0) throw std::domain_error("ExtReal::log2 of zero");
  return static_cast<double>(exp2_) + std::log2(sig_);
}

ExtReal ExtReal::operator-() const {
  ExtReal r = *this;
  r.sign_ = -r.sign_;
  return r;
}

ExtReal& ExtReal::operator+=(const ExtReal& o) {
  if (o.sign_ == 0) return *this;
  if (sign_ == 0) return *this = o;
  const ExtReal* big = this;
  const ExtReal* small = &o;
  if (o.exp2_ > exp2_) std::swap(big, small);
  std::int64_t gap = big->exp2_ - small->exp2_;
  if (gap > kAbsorbGap) return *this = *big;
  double s = big->sign_ * big->sig_ + small->sign_ * std::ldexp(small->sig_, -static_cast<int>(gap));
  std::int64_t e = big->exp2_;
  if (s == 0.0) return *this = ExtReal();
  return *this = compose(s < 0 ? -1 : 1, std::fabs(s), e);
}

ExtReal& ExtReal::operator-=(const ExtReal& o) { return *this += -o; }

ExtReal& ExtReal::operator*=(const ExtReal& o) {
  if (sign_ == 0 || o.sign_ == 0) return *this = ExtReal();
  return *this = compose(sign_ * o.sign_, sig_ * o.sig_, exp2_ + o.exp2_);
}

ExtReal& ExtReal::operator/=(const ExtReal& o) {
  if (o.sign_ == 0) throw std::domain_error("ExtReal: division by zero");
  if (sign_ == 0) return *this;
  return *this = compose(sign_ * o.sign_, sig_ / o.sig_, exp2_ - o.exp2_);
}

ExtReal ExtReal::ldexp(std::int64_t e) const {
  if (sign_ == 0) return *this;
  ExtReal r = *this;
  r.exp2_ += e;
  return r;
}

std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  if (a.sign_ == 0) return std::strong_ordering::equal;
  std::strong_ordering mag = std::strong_ordering::equal;
  if (a.exp2_ != b.exp2_) {
    mag = a.exp2_ <=> b.exp2_;
  } else if (a.sig_ < b.sig_) {
    mag = std::strong_ordering::less;
  } else if (a.sig_ > b.sig_) {
    mag = std::strong_ordering::greater;
  }
  if (a.sign_ > 0) return mag;
  return 0 <=> mag;
}

std::string ExtReal::to_triple() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d %.17g %lld", sign_, sig_, static_cast<long long>(exp2_));
  return buf;
}

std::string ExtReal::to_string() const {
  if (sign_ == 0) return "0";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.12g*2^%lld", sign_ * sig_, static_cast<long long>(exp2_));
  return buf;
}

ExtReal abs(const ExtReal& x) { return x.sign() < 0 ? -x : x; }

int cmp(const ExtReal& a, const ExtReal& b) {
  auto c = a <=> b;
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }
ExtReal min(const ExtReal& a, const ExtReal& b) { return b < a ? b : a; }

ExtReal pow_real(const ExtReal& x, double r) {
  if (x.sign() <= 0) throw std::domain_error("pow_real: base must be positive");
  if (!std::isfinite(r)) throw std::domain_error("pow_real: non-finite exponent");
  if (r == 0.0) return ExtReal::one();
  if (r == 1.0) return x;
  // r * (e + log2 m) = r*e (split exactly) + r*log2 m
  double e = static_cast<double>(x.exp2());
  double hi = e * r;
  double lo = std::fma(e, r, -hi);
  double ip = std::floor(hi);
  double frac = (hi - ip) + lo + r * std::log2(x.significand());
  double ip2 = std::floor(frac);
  frac -= ip2;
  return ExtReal::compose(1, std::exp2(frac),
                          static_cast<std::int64_t>(ip) + static_cast<std::int64_t>(ip2));
}

void CompensatedSum::add(const ExtReal& x) {
  ExtReal t = sum_ + x;
  if (abs(sum_) >= abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

ExtReal sum_compensated(std::span<const ExtReal> terms) {
  CompensatedSum acc;
  for (const auto& t : terms) acc.add(t);
  return acc.value();
}

double relative_difference(const ExtReal& a, const ExtReal& b) {
  ExtReal scale = max(abs(a), abs(b));
  if (scale.is_zero()) return 0.0;
  return (abs(a - b) / scale).to_double();
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.to_string(); }

}  // namespace jnp
