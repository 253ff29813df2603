// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo summaries and classical tests: sample means, exact binomial
// intervals and Kolmogorov-Smirnov statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/beta.hpp>

#include "bdp/errors.hpp"

namespace bdp {

enum class EstimateMethod { plain, log_sum_exp, binomial_exact };

inline std::string_view to_string(EstimateMethod m) {
  switch (m) {
    case EstimateMethod::plain: return "plain";
    case EstimateMethod::log_sum_exp: return "log-sum-exp";
    case EstimateMethod::binomial_exact: return "binomial-exact";
  }
  return "plain";
}

/// Monte Carlo point estimate with its uncertainty.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  EstimateMethod method = EstimateMethod::plain;
  std::vector<std::string> warnings;
};

inline constexpr double kZ975 = 1.959963984540054;

/// Pairwise (cascade) summation in index order; the result depends only on
/// the sequence, never on how it was produced.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

/// Sample mean with standard error and a normal-approximation 95% interval.
inline Estimate mean_estimate(std::span<const double> xs) {
  if (xs.empty()) throw DomainError("mean_estimate: empty sample");
  const auto n = static_cast<double>(xs.size());
  const double mean = pairwise_sum(xs) / n;
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
  const double var = xs.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  const double se = std::sqrt(var / n);
  return {mean, se, xs.size(), mean - kZ975 * se, mean + kZ975 * se, EstimateMethod::plain, {}};
}

struct Interval {
  double low;
  double high;
};

/// Exact (Clopper-Pearson) two-sided interval at level 1 - alpha. With zero
/// successes the exact one-sided upper bound 1 - alpha^(1/n) is returned
/// instead, with a lower end of 0.
inline Interval clopper_pearson(std::size_t successes, std::size_t trials, double alpha = 0.05) {
  if (trials == 0 || successes > trials) throw DomainError("clopper_pearson: need 0 <= k <= n, n > 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("clopper_pearson: alpha must lie in (0, 1)");
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  if (successes == 0) return {0.0, -std::expm1(std::log(alpha) / n)};
  using boost::math::beta_distribution;
  using boost::math::quantile;
  const double low = quantile(beta_distribution<double>(k, n - k + 1.0), alpha / 2.0);
  const double high =
      successes == trials ? 1.0 : quantile(beta_distribution<double>(k + 1.0, n - k), 1.0 - alpha / 2.0);
  return {low, high};
}

/// Binomial proportion estimate with its Clopper-Pearson interval.
inline Estimate binomial_estimate(std::size_t successes, std::size_t trials, double alpha = 0.05) {
  const Interval ci = clopper_pearson(successes, trials, alpha);
  const double p = static_cast<double>(successes) / static_cast<double>(trials);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return {p, se, trials, ci.low, ci.high, EstimateMethod::binomial_exact, {}};
}

/// Survival function of the Kolmogorov distribution, P(K > x).
inline double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  constexpr double kPi = std::numbers::pi;
  if (x < 1.0) {
    // Jacobi-transformed series, fast for small x.
    double sum = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      sum += std::exp(-m * m * kPi * kPi / (8.0 * x * x));
    }
    return std::clamp(1.0 - std::sqrt(2.0 * kPi) / x * sum, 0.0, 1.0);
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-300) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic;
  double p_value;
};

/// Asymptotic p-value with Stephens' small-sample correction.
inline double ks_p_value(double statistic, double effective_n) {
  const double rn = std::sqrt(effective_n);
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * statistic);
}

/// Exact two-sample KS statistic sup |F_x - F_y| with asymptotic p-value.
inline KsResult ks_two_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty() || ys.empty()) throw DomainError("ks_two_sample: empty sample");
  std::vector<double> a(xs.begin(), xs.end());
  std::vector<double> b(ys.begin(), ys.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_p_value(d, na * nb / (na + nb))};
}

/// One-sample KS statistic against an arbitrary continuous CDF.
template <class Cdf>
KsResult ks_one_sample(std::span<const double> xs, const Cdf& cdf) {
  if (xs.empty()) throw DomainError("ks_one_sample: empty sample");
  std::vector<double> a(xs.begin(), xs.end());
  std::sort(a.begin(), a.end());
  const auto n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return {d, ks_p_value(d, n)};
}

/// One-sample KS against Exponential with the given mean, F(x) = 1 - e^{-x/mean}.
/// Exact zeros are allowed (F(0) = 0); negative observations are not.
inline KsResult ks_exponential(std::span<const double> xs, double mean) {
  if (!(mean > 0.0)) throw DomainError("ks_exponential: mean must be positive");
  for (double x : xs) {
    if (x < 0.0 || !std::isfinite(x)) throw DomainError("ks_exponential: observations must be >= 0");
  }
  return ks_one_sample(xs, [mean](double x) { return -std::expm1(-x / mean); });
}

/// Pearson correlation of two equally long samples.
inline double correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw DomainError("correlation: need equal sizes >= 2");
  const auto n = static_cast<double>(xs.size());
  const double mx = pairwise_sum(xs) / n;
  const double my = pairwise_sum(ys) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace bdp
