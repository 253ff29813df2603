// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>

#include "bdp/errors.hpp"

namespace bdp {

inline constexpr double kQuadratureTolerance = 1e-10;
inline constexpr int kQuadratureMaxDepth = 60;

namespace detail {

struct SimpsonState {
  int max_depth;
  bool exhausted = false;
};

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth, SimpsonState& state) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double sum = left + right;
  const double delta = sum - whole;
  const bool converged =
      std::abs(delta) <= 15.0 * tol ||
      std::abs(delta) <= 64.0 * std::numeric_limits<double>::epsilon() * std::abs(sum);
  if (converged) return sum + delta / 15.0;
  if (depth >= state.max_depth || !(a < lm && rm < b)) {
    state.exhausted = true;
    return sum + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, state) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, state);
}

template <class F>
double simpson(const F& f, double a, double b, double tol, SimpsonState& state) {
  if (!(a < b)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 0, state);
}

}  // namespace detail

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance `tol`.
///
/// The interval is split a priori into two end pieces of width (b-a)/8 and an
/// interior piece. On the end pieces the substitution x = a + u^2 (resp.
/// b - u^2) is applied, which turns integrable square-root behaviour at an
/// endpoint into a smooth integrand. Throws AccuracyError (carrying the best
/// estimate) if the recursion reaches `max_depth` on any piece.
template <class F>
double adaptive_quadrature(const F& f, double a, double b, double tol = kQuadratureTolerance,
                           int max_depth = kQuadratureMaxDepth) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("adaptive_quadrature: non-finite bounds");
  if (a > b) throw DomainError("adaptive_quadrature: requires a <= b");
  if (!(tol > 0.0)) throw DomainError("adaptive_quadrature: tolerance must be positive");
  if (a == b) return 0.0;

  const double w = (b - a) / 8.0;
  const double root_w = std::sqrt(w);
  const double piece_tol = tol / 3.0;
  detail::SimpsonState state{max_depth};

  const auto left = [&](double u) { return 2.0 * u * f(a + u * u); };
  const auto right = [&](double u) { return 2.0 * u * f(b - u * u); };

  const double total = detail::simpson(left, 0.0, root_w, piece_tol, state) +
                       detail::simpson(f, a + w, b - w, piece_tol, state) +
                       detail::simpson(right, 0.0, root_w, piece_tol, state);
  if (state.exhausted) throw AccuracyError("adaptive_quadrature: maximum depth exceeded", total);
  return total;
}

}  // namespace bdp
