#pragma once

#include "jnp/xreal.hpp"

// Closed forms for one linear roof piece y(x) = y0 + dy * x / len, x in
// [0, len), raised to a power r > 0. Heights are nonnegative.
namespace jnp::roof {

/// ((1+w)^m - 1 - m*w) / m for w >= -1, stable for small |w|.
double power_excess(double w, double m);

/// Integral of y^r over the piece.
ExtReal integral(const ExtReal& y0, const ExtReal& dy, const ExtReal& len, double r);

/// Integral of |y^r - c| over the piece, c >= 0.
ExtReal abs_dev(const ExtReal& y0, const ExtReal& dy, const ExtReal& len, double r,
                const ExtReal& c);

/// Measure of {x : y(x)^r > t} within the piece, t >= 0.
ExtReal measure_above(const ExtReal& y0, const ExtReal& dy, const ExtReal& len, double r,
                      const ExtReal& t);

/// y^r with the r == 1 and y == 0 cases exact.
ExtReal rpow(const ExtReal& y, double r);

}  // namespace jnp::roof
