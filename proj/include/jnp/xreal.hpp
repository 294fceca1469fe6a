#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>

namespace jnp {

/// Real number with a double-precision significand and a 64-bit binary
/// exponent. Nonzero values are kept normalized with significand in [1, 2);
/// zero is canonical (sign 0, significand 1, exponent 0). There are no
/// infinities or NaNs: out-of-domain operations throw std::domain_error.
class ExtReal {
 public:
  constexpr ExtReal() = default;

  /// Exact conversion from a finite double. Non-finite input throws.
  explicit ExtReal(double x);

  /// Builds sign * significand * 2^exp2 and normalizes. The significand may be
  /// any positive finite double; sign must be -1, 0 or +1.
  static ExtReal compose(int sign, double significand, std::int64_t exp2);

  static ExtReal zero() { return ExtReal(); }
  static ExtReal one() { return compose(1, 1.0, 0); }
  /// 2^e for an integer exponent.
  static ExtReal pow2(std::int64_t e) { return compose(1, 1.0, e); }
  /// 2^x for a real exponent, splitting x into integer and fractional parts.
  static ExtReal exp2_real(double x);
  /// 2^(n * r) for an integer n and real r, with the product split exactly.
  static ExtReal exp2_scaled(std::int64_t n, double r);
  /// 2^(n / d) for an integer n and real d != 0, with the quotient split exactly.
  static ExtReal exp2_ratio(std::int64_t n, double d);

  int sign() const { return sign_; }
  double significand() const { return sig_; }
  std::int64_t exp2() const { return exp2_; }
  bool is_zero() const { return sign_ == 0; }

  /// Nearest double; overflows to +-HUGE_VAL and underflows to 0.
  double to_double() const;
  /// log2 |x|. Zero throws.
  double log2() const;

  ExtReal operator-() const;
  ExtReal& operator+=(const ExtReal& o);
  ExtReal& operator-=(const ExtReal& o);
  ExtReal& operator*=(const ExtReal& o);
  ExtReal& operator/=(const ExtReal& o);

  friend ExtReal operator+(ExtReal a, const ExtReal& b) { return a += b; }
  friend ExtReal operator-(ExtReal a, const ExtReal& b) { return a -= b; }
  friend ExtReal operator*(ExtReal a, const ExtReal& b) { return a *= b; }
  friend ExtReal operator/(ExtReal a, const ExtReal& b) { return a /= b; }

  /// Multiplication by 2^e, exact.
  ExtReal ldexp(std::int64_t e) const;

  friend bool operator==(const ExtReal& a, const ExtReal& b) {
    return a.sign_ == b.sign_ && a.sig_ == b.sig_ && a.exp2_ == b.exp2_;
  }
  friend std::strong_ordering operator<=>(const ExtReal& a, const ExtReal& b);

  /// "s m e" with m printed to round-trip precision.
  std::string to_triple() const;
  /// Human readable, e.g. "1.5*2^-40".
  std::string to_string() const;

 private:
  int sign_ = 0;
  double sig_ = 1.0;
  std::int64_t exp2_ = 0;
};

ExtReal abs(const ExtReal& x);
int cmp(const ExtReal& a, const ExtReal& b);
ExtReal max(const ExtReal& a, const ExtReal& b);
ExtReal min(const ExtReal& a, const ExtReal& b);

/// x^r for x > 0, computed as 2^(r*log2 x) with the integer part of the
/// exponent handled exactly. Nonpositive x throws std::domain_error.
ExtReal pow_real(const ExtReal& x, double r);

/// Neumaier-compensated sum.
ExtReal sum_compensated(std::span<const ExtReal> terms);

/// Running compensated accumulator, same scheme as sum_compensated.
class CompensatedSum {
 public:
  void add(const ExtReal& x);
  ExtReal value() const { return sum_ + comp_; }

 private:
  ExtReal sum_;
  ExtReal comp_;
};

/// |a - b| / max(|a|, |b|); 0 when both are zero.
double relative_difference(const ExtReal& a, const ExtReal& b);

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

}  // namespace jnp
