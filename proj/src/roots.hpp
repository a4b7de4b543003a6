#pragma once

// Scalar root finding and maximization shared by the solvers.

#include <cmath>
#include <limits>
#include <utility>

#include "jumpdrift/errors.hpp"

namespace jumpdrift::detail {

/// Root of f on [lo, hi] where f(lo) and f(hi) have opposite signs. Newton
/// steps from the current iterate are accepted when they stay strictly inside
/// the bracket, otherwise the bracket is bisected. Runs until the bracket
/// collapses to a few ulps or f vanishes.
template <class F, class DF>
double bracketed_newton(F&& f, DF&& df, double lo, double hi, double f_lo, double f_hi) {
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi))
    throw NoSolution("root is not bracketed");
  const bool increasing = f_lo < 0.0;
  double x = 0.5 * (lo + hi);
  double width_before = hi - lo;
  for (int iter = 0; iter < 400; ++iter) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == increasing) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
      return x;
    const double slope = df(x);
    double next = x - fx / slope;
    // Newton creeping from one side of a steep function shrinks the bracket
    // slowly; bisect whenever the last step failed to halve it.
    const bool slow = hi - lo > 0.5 * width_before;
    width_before = hi - lo;
    if (slow || !std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  return x;
}

/// Golden-section maximization of a unimodal function on [lo, hi].
template <class F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  if (!(hi > lo)) return {lo, f(lo)};
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  const double fx = f(x);
  // The interior probes can beat the midpoint on flat or kinked objectives.
  if (fc > fx && fc >= fd) return {c, fc};
  if (fd > fx) return {d, fd};
  return {x, fx};
}

}  // namespace jumpdrift::detail
