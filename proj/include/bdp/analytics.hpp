// SPDX-License-Identifier: Apache-2.0
//
// Closed forms, integral forms and variational forms of the Lyapunov
// exponents and upper-tail rate functions of Brownian directed percolation.
//
// Notation used throughout:
//   Lambda_{s,t}(lambda)  point-to-point Lyapunov exponent, lines ~ s n, time ~ t n
//   J_{s,t}(r)            upper-tail rate function of the same passage time
//   mu                    boundary drift of the increment-stationary model
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "bdp/errors.hpp"
#include "bdp/extended_value.hpp"
#include "bdp/optimize.hpp"
#include "bdp/quadrature.hpp"

namespace bdp::analytics {

/// Parameter bundle shared by every formula. Operations read only the
/// fields they need.
struct ShapeTiltParams {
  double s = 1.0;       ///< line density, > 0
  double t = 1.0;       ///< time, > 0
  double lambda = 0.0;  ///< exponential tilt, >= 0
  double mu = 1.0;      ///< boundary drift, > 0
  double r = 0.0;       ///< deviation level

  void validate() const {
    if (!(s > 0.0) || !(t > 0.0)) throw DomainError("ShapeTiltParams: s and t must be positive");
    if (!(mu > 0.0)) throw DomainError("ShapeTiltParams: mu must be positive");
    if (!(lambda >= 0.0)) throw DomainError("ShapeTiltParams: lambda must be non-negative");
    if (!std::isfinite(r)) throw DomainError("ShapeTiltParams: r must be finite");
  }
};

/// Result of a one-dimensional convex minimisation.
struct VariationalSolution {
  double value;
  double argmin;  ///< optimising mu (or z = mu - lambda)
  std::size_t iterations;
  double residual;  ///< relative residual of the first-order condition
};

inline constexpr double kSolverTolerance = 1e-9;

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(what);
}

inline void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(what);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Upper-tail rate function at s = t = 1, centred at the LLN value 2.

/// 4 * int_0^r sqrt(x (x + 2)) dx.
inline double j_gue(double r) {
  detail::require_non_negative(r, "j_gue: r must be >= 0");
  return 4.0 * adaptive_quadrature([](double x) { return std::sqrt(x * (x + 2.0)); }, 0.0, r,
                                   kQuadratureTolerance / 4.0);
}

// ---------------------------------------------------------------------------
// Point-to-point Lyapunov exponent.

/// Closed form of Lambda_{s,t}(lambda), continuously extended to s = 0
/// (lambda^2 t / 2) and t = 0 (zero).
inline double lambda_pp_closed(double s, double t, double lambda) {
  detail::require_non_negative(s, "lambda_pp_closed: s must be >= 0");
  detail::require_non_negative(t, "lambda_pp_closed: t must be >= 0");
  detail::require_non_negative(lambda, "lambda_pp_closed: lambda must be >= 0");
  if (s == 0.0 && t == 0.0) throw DomainError("lambda_pp_closed: s and t cannot both be zero");
  if (s == 0.0) return 0.5 * lambda * lambda * t;
  if (t == 0.0 || lambda == 0.0) return 0.0;
  const double root = std::sqrt(4.0 * s * t + (t * lambda) * (t * lambda));
  return 0.5 * lambda * root + s * std::log1p((t * lambda * lambda + lambda * root) / (2.0 * s));
}

/// int_0^lambda sqrt(4 s t + (t x)^2) dx by adaptive quadrature.
inline double lambda_pp_integral(double s, double t, double lambda) {
  detail::require_positive(s, "lambda_pp_integral: s must be > 0");
  detail::require_positive(t, "lambda_pp_integral: t must be > 0");
  detail::require_non_negative(lambda, "lambda_pp_integral: lambda must be >= 0");
  const double c = 4.0 * s * t;
  return adaptive_quadrature([&](double x) { return std::sqrt(c + (t * x) * (t * x)); }, 0.0,
                             lambda);
}

/// min over mu > lambda of t (lambda mu - lambda^2/2) + s log(mu / (mu - lambda)).
///
/// Golden-section search on [lambda + 1e-8, lambda + B], B doubled until the
/// derivative changes sign, followed by bisection on the derivative inside the
/// final golden bracket. The objective is strictly convex.
inline VariationalSolution lambda_pp_variational(double s, double t, double lambda) {
  detail::require_positive(s, "lambda_pp_variational: s must be > 0");
  detail::require_positive(t, "lambda_pp_variational: t must be > 0");
  detail::require_positive(lambda, "lambda_pp_variational: lambda must be > 0");

  const auto objective = [&](double mu) {
    return t * (lambda * mu - 0.5 * lambda * lambda) - s * std::log1p(-lambda / mu);
  };
  // Sign of the derivative, as mu (mu - lambda) - s / t.
  const double target = s / t;
  const auto foc = [&](double mu) { return mu * (mu - lambda) - target; };

  constexpr double kEps = 1e-8;
  const double lo = lambda + kEps;
  double width = 1.0;
  std::size_t doublings = 0;
  while (foc(lambda + width) <= 0.0) {
    width *= 2.0;
    if (++doublings > 1100) {
      throw SolverError("lambda_pp_variational: could not bracket the minimiser", lambda + width,
                        objective(lambda + width));
    }
  }
  const double hi = lambda + width;
  if (foc(lo) >= 0.0) {
    // Minimiser closer to lambda than the bracket floor allows.
    throw SolverError("lambda_pp_variational: minimiser below bracket floor", lo, objective(lo));
  }

  auto golden = golden_section_minimize(objective, lo, hi, 1e-12);
  std::size_t iterations = golden.iterations + doublings;
  double a = golden.bracket_low;
  double b = golden.bracket_high;
  // The golden bracket may exclude the root of the first-order condition by
  // a few ulps of the objective; widen it until it straddles the sign change.
  while (foc(a) > 0.0) a = std::max(lo, a - (b - a));
  while (foc(b) < 0.0) b = std::min(hi, b + (b - a));
  const double mu_star = bisect_increasing(foc, a, b, iterations);
  const double residual = std::abs(foc(mu_star)) / target;
  if (!(residual <= kSolverTolerance)) {
    throw SolverError("lambda_pp_variational: first-order residual above tolerance", mu_star,
                      objective(mu_star));
  }
  return {objective(mu_star), mu_star, iterations, residual};
}

// ---------------------------------------------------------------------------
// Point-to-point upper-tail rate function.

/// Closed form of J_{s,t}(r); zero for r <= 2 sqrt(s t).
inline double j_pp_closed(double s, double t, double r) {
  detail::require_positive(s, "j_pp_closed: s must be > 0");
  detail::require_positive(t, "j_pp_closed: t must be > 0");
  if (!std::isfinite(r)) throw DomainError("j_pp_closed: r must be finite");
  if (r <= 2.0 * std::sqrt(s * t)) return 0.0;
  const double root = std::sqrt(r * r - 4.0 * s * t);
  // (r - root) / (r + root) = 4 s t / (r + root)^2, avoiding cancellation.
  const double sum = r + root;
  return r * root / (2.0 * t) + s * std::log(4.0 * s * t / (sum * sum));
}

/// 1{r >= 2 sqrt(st)} int_0^{r - 2 sqrt(st)} t^{-1} sqrt(x (x + 4 sqrt(st))) dx.
inline double j_pp_integral(double s, double t, double r) {
  detail::require_positive(s, "j_pp_integral: s must be > 0");
  detail::require_positive(t, "j_pp_integral: t must be > 0");
  if (!std::isfinite(r)) throw DomainError("j_pp_integral: r must be finite");
  const double edge = 2.0 * std::sqrt(s * t);
  if (r <= edge) return 0.0;
  const double c = 2.0 * edge;
  return adaptive_quadrature([&](double x) { return std::sqrt(x * (x + c)) / t; }, 0.0, r - edge);
}

/// sup over lambda, z > 0 of lambda r - t (lambda^2/2 + z lambda) - s log((z + lambda)/z).
///
/// The inner supremum over z is -Lambda_{s,t}(lambda), obtained from
/// lambda_pp_variational (z = mu - lambda). The outer concave problem in
/// lambda uses a coarse grid followed by golden-section refinement.
inline double j_pp_conjugate(double s, double t, double r) {
  detail::require_positive(s, "j_pp_conjugate: s must be > 0");
  detail::require_positive(t, "j_pp_conjugate: t must be > 0");
  const double edge = 2.0 * std::sqrt(s * t);
  if (!std::isfinite(r) || r < edge * (1.0 - 1e-12)) {
    throw DomainError("j_pp_conjugate: requires r >= 2 sqrt(s t)");
  }
  const auto outer = [&](double lambda) {
    return lambda * r - lambda_pp_variational(s, t, lambda).value;
  };

  double upper = 1.0;
  std::size_t doublings = 0;
  while (outer(2.0 * upper) > outer(upper)) {
    upper *= 2.0;
    if (++doublings > 200) {
      throw SolverError("j_pp_conjugate: outer supremum not bracketed", upper, outer(upper));
    }
  }
  constexpr std::size_t kGrid = 64;
  const double span = 2.0 * upper;
  std::size_t best = 1;
  double best_value = outer(span / kGrid);
  for (std::size_t k = 2; k <= kGrid; ++k) {
    const double v = outer(span * static_cast<double>(k) / kGrid);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = best == 1 ? span * 1e-12 : span * static_cast<double>(best - 1) / kGrid;
  const double hi = span * static_cast<double>(std::min(best + 1, kGrid)) / kGrid;
  const auto refined = golden_section_maximize(outer, lo, hi, 1e-12);
  // The supremum is approached as lambda -> 0 on the zero region boundary.
  return std::max({0.0, refined.value, best_value});
}

// ---------------------------------------------------------------------------
// Numerical Legendre conjugate of a tabulated convex function.

/// A convex function tabulated on an increasing grid. `evaluate`, when set,
/// is used for local refinement around the discrete maximiser. With
/// `constant_below` the function is understood to be constant (equal to its
/// first tabulated value) on (-inf, abscissae.front()].
struct Tabulation {
  std::vector<double> abscissae;
  std::vector<double> values;
  std::function<double(double)> evaluate;
  bool constant_below = false;
};

inline Tabulation tabulate(std::function<double(double)> f, double lo, double hi, std::size_t points,
                           bool constant_below = false) {
  if (points < 2 || !(lo < hi)) throw DomainError("tabulate: need at least two points on lo < hi");
  Tabulation tab;
  tab.abscissae.resize(points);
  tab.values.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    tab.abscissae[i] = x;
    tab.values[i] = f(x);
  }
  tab.evaluate = std::move(f);
  tab.constant_below = constant_below;
  return tab;
}

/// J_{s,t} on [2 sqrt(st), 2 sqrt(st) + 20] with 4001 points, flat to the left.
inline Tabulation tabulate_j(double s, double t, std::size_t points = 4001, double width = 20.0) {
  const double edge = 2.0 * std::sqrt(s * t);
  return tabulate([s, t](double r) { return j_pp_closed(s, t, r); }, edge, edge + width, points,
                  true);
}

/// sup_r { lambda r - f(r) } over the tabulation, refined locally by golden
/// section when the tabulation carries an evaluator. Returns +infinity for
/// lambda < 0 when the function is flat to the left.
inline ExtendedValue legendre_conjugate(const Tabulation& f, double lambda) {
  if (f.abscissae.empty() || f.abscissae.size() != f.values.size()) {
    throw DomainError("legendre_conjugate: empty or inconsistent tabulation");
  }
  if (!std::isfinite(lambda)) throw DomainError("legendre_conjugate: lambda must be finite");
  if (lambda < 0.0 && f.constant_below) return ExtendedValue::infinity();

  const std::size_t n = f.abscissae.size();
  std::size_t best = 0;
  double best_value = lambda * f.abscissae[0] - f.values[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double v = lambda * f.abscissae[i] - f.values[i];
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  if (f.evaluate && n >= 2) {
    const double lo = f.abscissae[best == 0 ? 0 : best - 1];
    const double hi = f.abscissae[best + 1 < n ? best + 1 : n - 1];
    const auto refined = golden_section_maximize(
        [&](double r) { return lambda * r - f.evaluate(r); }, lo, hi, 1e-13);
    best_value = std::max(best_value, refined.value);
  }
  return ExtendedValue::finite(best_value);
}

// ---------------------------------------------------------------------------
// Increment-stationary model.

/// Lyapunov exponent of the stationary passage time: the larger of the two
/// branches for lambda < mu, +infinity for lambda >= mu.
inline ExtendedValue lambda_stationary(double s, double t, double lambda, double mu) {
  detail::require_positive(s, "lambda_stationary: s must be > 0");
  detail::require_positive(t, "lambda_stationary: t must be > 0");
  detail::require_positive(mu, "lambda_stationary: mu must be > 0");
  detail::require_non_negative(lambda, "lambda_stationary: lambda must be >= 0");
  if (lambda >= mu) return ExtendedValue::infinity();
  const double half_sq = 0.5 * lambda * lambda;
  const double boundary_branch = t * (half_sq + mu * lambda) + s * std::log1p(lambda / mu);
  const double vertical_branch = t * (mu * lambda - half_sq) - s * std::log1p(-lambda / mu);
  return ExtendedValue::finite(std::max(boundary_branch, vertical_branch));
}

/// The same exponent from its variational characterisation:
///   sup_{0<=r<=t} { r (lambda mu + lambda^2/2) + Lambda_{s,t-r}(lambda) }
///   v sup_{0<=u<=s} { u log(mu/(mu-lambda)) + Lambda_{s-u,t}(lambda) }.
/// Both suprema are of concave functions and are found by golden section.
inline double lambda_stationary_variational(double s, double t, double lambda, double mu) {
  detail::require_positive(s, "lambda_stationary_variational: s must be > 0");
  detail::require_positive(t, "lambda_stationary_variational: t must be > 0");
  detail::require_positive(mu, "lambda_stationary_variational: mu must be > 0");
  detail::require_positive(lambda, "lambda_stationary_variational: lambda must be > 0");
  if (lambda >= mu) throw DomainError("lambda_stationary_variational: requires lambda < mu");

  const double drift = lambda * mu + 0.5 * lambda * lambda;
  const double queue = -std::log1p(-lambda / mu);
  const auto horizontal = [&](double r) {
    return r * drift + lambda_pp_closed(s, std::max(0.0, t - r), lambda);
  };
  const auto vertical = [&](double u) {
    return u * queue + lambda_pp_closed(std::max(0.0, s - u), t, lambda);
  };
  const double h = std::max({golden_section_maximize(horizontal, 0.0, t, 1e-13).value,
                             horizontal(0.0), horizontal(t)});
  const double v = std::max({golden_section_maximize(vertical, 0.0, s, 1e-13).value, vertical(0.0),
                             vertical(s)});
  return std::max(h, v);
}

/// Right-hand side of the variational identity that characterises
/// Lambda_{s,t}(lambda) through the stationary queue:
///   sup_{0<=r<t} { (t-r)(lambda^2/2 - mu lambda) + Lambda_{s,t-r}(lambda) }
///   v sup_{0<=u<s} { t(lambda^2/2 - mu lambda) + u log(mu/(mu-lambda)) + Lambda_{s-u,t}(lambda) }.
/// For every 0 < lambda < mu this equals s log(mu / (mu - lambda)).
inline double queue_variational_rhs(double s, double t, double lambda, double mu) {
  detail::require_positive(s, "queue_variational_rhs: s must be > 0");
  detail::require_positive(t, "queue_variational_rhs: t must be > 0");
  detail::require_positive(lambda, "queue_variational_rhs: lambda must be > 0");
  if (!(lambda < mu)) throw DomainError("queue_variational_rhs: requires lambda < mu");

  const double drift = 0.5 * lambda * lambda - mu * lambda;
  const double queue = -std::log1p(-lambda / mu);
  const auto horizontal = [&](double r) {
    return (t - r) * drift + lambda_pp_closed(s, std::max(0.0, t - r), lambda);
  };
  const auto vertical = [&](double u) {
    return t * drift + u * queue + lambda_pp_closed(std::max(0.0, s - u), t, lambda);
  };
  const double h = std::max(golden_section_maximize(horizontal, 0.0, t, 1e-13).value,
                            horizontal(0.0));
  const double v = std::max(golden_section_maximize(vertical, 0.0, s, 1e-13).value, vertical(0.0));
  return std::max(h, v);
}

}  // namespace bdp::analytics
