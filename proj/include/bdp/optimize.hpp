// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>

#include "bdp/errors.hpp"

namespace bdp {

struct ScalarOptimum {
  double argument;
  double value;
  std::size_t iterations;
  double bracket_low;
  double bracket_high;
};

/// Golden-section search for the minimum of a unimodal function on [lo, hi].
/// Stops when the bracket is narrower than `xtol * (1 + |x|)` or stops
/// shrinking in floating point.
template <class F>
ScalarOptimum golden_section_minimize(const F& f, double lo, double hi, double xtol = 1e-12,
                                      std::size_t max_iterations = 500) {
  if (!(lo <= hi)) throw DomainError("golden_section_minimize: empty bracket");
  constexpr double kInvPhi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  std::size_t it = 0;
  for (; it < max_iterations; ++it) {
    const double mid = 0.5 * (a + b);
    if (b - a <= xtol * (1.0 + std::abs(mid))) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      if (!(a < c && c < d)) break;
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      if (!(c < d && d < b)) break;
      fd = f(d);
    }
  }
  const double x = fc < fd ? c : d;
  const double fx = fc < fd ? fc : fd;
  if (it == max_iterations) throw SolverError("golden_section_minimize: iteration limit", x, fx);
  return {x, fx, it, a, b};
}

/// Maximum of a unimodal function, via golden_section_minimize on -f.
template <class F>
ScalarOptimum golden_section_maximize(const F& f, double lo, double hi, double xtol = 1e-12,
                                      std::size_t max_iterations = 500) {
  auto r = golden_section_minimize([&](double x) { return -f(x); }, lo, hi, xtol, max_iterations);
  r.value = -r.value;
  return r;
}

/// Bisection for the sign change of an increasing function on [lo, hi].
/// Returns the narrowest representable bracket midpoint; the number of
/// iterations used is added to `iterations`.
template <class F>
double bisect_increasing(const F& g, double lo, double hi, std::size_t& iterations,
                         std::size_t max_iterations = 200) {
  for (std::size_t k = 0; k < max_iterations; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) return mid;
    ++iterations;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace bdp
