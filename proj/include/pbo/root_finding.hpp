#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pbo {

/// Root of a continuous, strictly decreasing function on an expanding
/// bracket. Starting from [lo, hi], the bracket is widened geometrically
/// until f changes sign, then a fixed number of bisection iterations is
/// run with no early stopping. Returns the final midpoint.
template <typename Fn>
double bisect_decreasing(Fn&& f, double lo, double hi, int iterations = 100) {
  if (!(hi > lo)) throw std::invalid_argument("bisect_decreasing: empty bracket");
  double width = hi - lo;
  int guard = 0;
  while (f(lo) < 0.0) {
    lo -= width;
    width *= 2.0;
    if (++guard > 200) throw std::runtime_error("bisect_decreasing: no sign change on the left");
  }
  guard = 0;
  while (f(hi) > 0.0) {
    hi += width;
    width *= 2.0;
    if (++guard > 200) throw std::runtime_error("bisect_decreasing: no sign change on the right");
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Golden-section minimizer of a convex function on [lo, hi].
/// Converges to an interval of the given width; returns its midpoint.
template <typename Fn>
double golden_section_min(Fn&& f, double lo, double hi, double width_tol = 1e-10) {
  constexpr double kGolden = 0.6180339887498948482;
  double a = lo, b = hi;
  double c = b - kGolden * (b - a);
  double d = a + kGolden * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGolden * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGolden * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace pbo
