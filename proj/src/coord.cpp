#include "jnp/coord.hpp"

#include <cmath>
#include <stdexcept>

namespace jnp {

Coord::Coord(const ExtReal& x) {
  if (x.is_zero()) return;
  // x = M * 2^(exp2 - 52) with M a 53-bit integer.
  auto mant = static_cast<std::uint64_t>(std::ldexp(x.significand(), 52));
  std::int64_t shift = x.exp2() - 52 + kFracBits;
  if (x.exp2() >= 62) throw std::out_of_range("Coord: magnitude exceeds integer part");
  Raw r = mant;
  if (shift >= 0) {
    r <<= static_cast<unsigned>(shift);
  } else if (shift > -64) {
    r >>= static_cast<unsigned>(-shift);
  } else {
    r = 0;
  }
  raw_ = x.sign() < 0 ? Raw(-r) : r;
}

ExtReal Coord::to_ext() const {
  if (raw_.is_zero()) return ExtReal();
  Raw mag = boost::multiprecision::abs(raw_);
  auto top = static_cast<std::int64_t>(boost::multiprecision::msb(mag));
  std::uint64_t head;
  if (top >= 63) {
    head = static_cast<std::uint64_t>(mag >> static_cast<unsigned>(top - 63));
  } else {
    head = static_cast<std::uint64_t>(mag << static_cast<unsigned>(63 - top));
  }
  // head holds the leading 64 bits with its top bit set.
  double m = std::ldexp(static_cast<double>(head), -63);
  return ExtReal::compose(raw_.sign() < 0 ? -1 : 1, m, top - kFracBits);
}

Interval::Interval(Coord s, Coord e) : start(std::move(s)), end(std::move(e)) {
  if (end < start) throw std::invalid_argument("Interval: end precedes start");
}

Interval intersect(const Interval& a, const Interval& b) {
  Coord s = max(a.start, b.start);
  Coord e = min(a.end, b.end);
  if (e < s) e = s;
  Interval r;
  r.start = s;
  r.end = e;
  return r;
}

bool overlaps(const Interval& a, const Interval& b) {
  return max(a.start, b.start) < min(a.end, b.end);
}

bool contains(const Interval& outer, const Interval& inner) {
  return outer.start <= inner.start && inner.end <= outer.end;
}

}  // namespace jnp
