#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "jnp/xreal.hpp"

namespace jnp {

/// Exact binary fixed-point position on the real line: 1024 fractional bits
/// and a 63-bit integer part. Every tower width and gap of a construction of
/// depth <= kMaxDepth is exactly representable, so tower layouts built by
/// adding these constants carry no rounding at all.
class Coord {
 public:
  static constexpr int kFracBits = 1024;
  using Raw = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<
      1088, 1088, boost::multiprecision::signed_magnitude, boost::multiprecision::unchecked, void>>;

  Coord() = default;
  explicit Coord(const ExtReal& x);
  explicit Coord(double x) : Coord(ExtReal(x)) {}

  static Coord from_raw(Raw r) {
    Coord c;
    c.raw_ = std::move(r);
    return c;
  }
  const Raw& raw() const { return raw_; }

  /// Rounds to the nearest ExtReal (53-bit significand).
  ExtReal to_ext() const;
  double to_double() const { return to_ext().to_double(); }
  bool is_zero() const { return raw_.is_zero(); }
  int sign() const { return raw_.sign(); }

  Coord& operator+=(const Coord& o) {
    raw_ += o.raw_;
    return *this;
  }
  Coord& operator-=(const Coord& o) {
    raw_ -= o.raw_;
    return *this;
  }
  friend Coord operator+(Coord a, const Coord& b) { return a += b; }
  friend Coord operator-(Coord a, const Coord& b) { return a -= b; }
  Coord operator-() const { return from_raw(-raw_); }
  /// Multiplication by an integer count, exact.
  friend Coord operator*(std::int64_t n, const Coord& c) { return from_raw(c.raw_ * n); }
  /// Division by two, truncating below 2^-1024.
  Coord half() const { return from_raw(raw_ / 2); }

  friend bool operator==(const Coord& a, const Coord& b) { return a.raw_ == b.raw_; }
  friend std::strong_ordering operator<=>(const Coord& a, const Coord& b) {
    int c = a.raw_.compare(b.raw_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  std::string to_string() const { return to_ext().to_string(); }

 private:
  Raw raw_;
};

inline Coord min(const Coord& a, const Coord& b) { return b < a ? b : a; }
inline Coord max(const Coord& a, const Coord& b) { return a < b ? b : a; }

/// Half-open segment [start, end) with start <= end.
struct Interval {
  Coord start;
  Coord end;

  Interval() = default;
  Interval(Coord s, Coord e);
  Interval(double s, double e) : Interval(Coord(s), Coord(e)) {}

  Coord length() const { return end - start; }
  ExtReal measure() const { return length().to_ext(); }
  bool empty() const { return !(start < end); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Intersection; empty intervals are returned as [s, s).
Interval intersect(const Interval& a, const Interval& b);
bool overlaps(const Interval& a, const Interval& b);
bool contains(const Interval& outer, const Interval& inner);

}  // namespace jnp
