// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo estimators for upper-tail probabilities and log moment
// generating functions of passage times.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bdp/analytics.hpp"
#include "bdp/errors.hpp"
#include "bdp/lpp.hpp"
#include "bdp/rmt.hpp"
#include "bdp/rng.hpp"
#include "bdp/stats.hpp"

namespace bdp::estimator {

/// Where draws of L_n(n) come from. `gue` is exact in law; `lpp` simulates
/// the discretised percolation with step `delta` on [0, n].
struct Sampler {
  enum class Kind { gue, lpp };
  Kind kind = Kind::gue;
  double delta = 1e-3;

  static Sampler gue() { return {Kind::gue, 0.0}; }
  static Sampler lpp(double delta) { return {Kind::lpp, delta}; }
};

inline std::string to_string(const Sampler& s) {
  return s.kind == Sampler::Kind::gue ? "gue" : "lpp(" + std::to_string(s.delta) + ")";
}

/// `count` draws of L_n(n). The GUE route uses L_n(n) = sqrt(n) L_n(1) in law.
inline std::vector<double> sample_scaled_passage(std::size_t n, const Sampler& sampler, std::size_t count,
                                                 std::uint64_t seed, std::size_t threads = 1) {
  if (n == 0) throw DomainError("sample_scaled_passage: n must be >= 1");
  if (sampler.kind == Sampler::Kind::gue) {
    auto xs = rmt::sample_gue_lmax_batch(n, count, seed, threads);
    const double scale = std::sqrt(static_cast<double>(n));
    for (double& x : xs) x *= scale;
    return xs;
  }
  return lpp::sample_passage_times(n, static_cast<double>(n), sampler.delta, seed, count, threads);
}

/// P(L_n(n) >= 2 n (1 + r)) with a Clopper-Pearson 95% interval. r >= -1 is
/// accepted so that the threshold can be pushed down to zero.
inline Estimate tail_probability(std::size_t n, double r, const Sampler& sampler, std::size_t n_samples,
                                 std::uint64_t seed, std::size_t threads = 1) {
  if (n == 0) throw DomainError("tail_probability: n must be >= 1");
  if (!(r >= -1.0) || !std::isfinite(r)) throw DomainError("tail_probability: r must be >= -1");
  if (n_samples < 1000) throw DomainError("tail_probability: need at least 1000 samples");
  const auto xs = sample_scaled_passage(n, sampler, n_samples, seed, threads);
  const double threshold = 2.0 * static_cast<double>(n) * (1.0 + r);
  const auto hits = static_cast<std::size_t>(std::count_if(xs.begin(), xs.end(), [threshold](double x) {
    return x >= threshold;
  }));
  return binomial_estimate(hits, n_samples);
}

struct BoundRow {
  std::size_t n = 0;
  Estimate probability;
  double bound = 1.0;        ///< exp(-n J_GUE(r))
  double rate_estimate = 0;  ///< -(1/n) log p_hat; +inf when p_hat = 0
  bool pass = false;         ///< CI upper end <= bound
};

struct BoundTable {
  double r = 0.0;
  double j_gue = 0.0;
  std::vector<BoundRow> rows;
  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const BoundRow& row) { return row.pass; });
  }
};

/// Checks P(L_n(n) >= 2n(1+r)) <= exp(-n J_GUE(r)) for each n by comparing
/// the upper end of the exact 95% interval with the bound. Rows use
/// independent seeds derived from `seed` and n.
inline BoundTable bound_check(const std::vector<std::size_t>& n_list, double r, const Sampler& sampler,
                              std::size_t n_samples, std::uint64_t seed, std::size_t threads = 1) {
  if (!(r >= 0.0)) throw DomainError("bound_check: r must be >= 0");
  BoundTable table;
  table.r = r;
  table.j_gue = analytics::j_gue(r);
  for (std::size_t n : n_list) {
    BoundRow row;
    row.n = n;
    row.probability = tail_probability(n, r, sampler, n_samples, rng::splitmix64(seed + n), threads);
    row.bound = std::exp(-static_cast<double>(n) * table.j_gue);
    row.rate_estimate = row.probability.mean > 0.0
                            ? -std::log(row.probability.mean) / static_cast<double>(n)
                            : std::numeric_limits<double>::infinity();
    row.pass = row.probability.ci_high <= row.bound;
    table.rows.push_back(row);
  }
  return table;
}

inline constexpr std::size_t kBootstrapResamples = 200;
inline constexpr double kMinEffectiveSampleSize = 50.0;

namespace detail {

/// log( (1/N) sum exp(lambda x_i) ) evaluated stably.
inline double log_mean_exp(double lambda, std::span<const double> xs) {
  double top = -std::numeric_limits<double>::infinity();
  for (double x : xs) top = std::max(top, lambda * x);
  std::vector<double> terms(xs.size());
  std::transform(xs.begin(), xs.end(), terms.begin(), [&](double x) { return std::exp(lambda * x - top); });
  return top + std::log(pairwise_sum(terms)) - std::log(static_cast<double>(xs.size()));
}

}  // namespace detail

/// log E[exp(lambda X)] from samples of X, by log-sum-exp. The standard
/// error comes from 200 bootstrap resamples drawn from stream (seed, 0).
/// A warning is attached when the effective sample size of the weights
/// exp(lambda x_i) falls below 50.
inline Estimate log_mgf_estimate(double lambda, std::span<const double> samples, std::uint64_t seed) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("log_mgf_estimate: lambda must be >= 0");
  if (samples.size() < 2) throw DomainError("log_mgf_estimate: need at least two samples");
  const double point = detail::log_mean_exp(lambda, samples);

  double top = -std::numeric_limits<double>::infinity();
  for (double x : samples) top = std::max(top, lambda * x);
  std::vector<double> w(samples.size());
  std::vector<double> w2(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    w[i] = std::exp(lambda * samples[i] - top);
    w2[i] = w[i] * w[i];
  }
  const double sw = pairwise_sum(w);
  const double ess = sw * sw / pairwise_sum(w2);

  rng::Stream stream(seed, 0);
  std::vector<double> resample(samples.size());
  std::vector<double> boot(kBootstrapResamples);
  for (double& b : boot) {
    for (double& x : resample) x = samples[stream() % samples.size()];
    b = detail::log_mean_exp(lambda, resample);
  }
  const double bm = pairwise_sum(boot) / static_cast<double>(boot.size());
  double var = 0.0;
  for (double b : boot) var += (b - bm) * (b - bm);
  const double se = std::sqrt(var / static_cast<double>(boot.size() - 1));

  Estimate e{point, se, samples.size(), point - kZ975 * se, point + kZ975 * se, EstimateMethod::log_sum_exp, {}};
  if (ess < kMinEffectiveSampleSize) {
    e.warnings.push_back("effective sample size " + std::to_string(ess) + " below " +
                         std::to_string(kMinEffectiveSampleSize) + ": tilt too aggressive");
  }
  return e;
}

struct LyapunovRow {
  std::size_t n = 0;
  Estimate scaled;   ///< (1/n) log E exp(lambda L_n(n)), stderr scaled likewise
  double limit = 0;  ///< Lambda_{1,1}(lambda)
  bool below_limit = false;
};

/// (1/n) log E[exp(lambda L_n(n))] for each n against Lambda_{1,1}(lambda);
/// superadditivity makes each finite-n value a lower bound for the limit.
inline std::vector<LyapunovRow> lyapunov_check(const std::vector<std::size_t>& n_list, double lambda,
                                               const Sampler& sampler, std::size_t n_samples,
                                               std::uint64_t seed, std::size_t threads = 1) {
  const double limit = analytics::lambda_pp_closed(1.0, 1.0, lambda);
  std::vector<LyapunovRow> rows;
  for (std::size_t n : n_list) {
    const std::uint64_t row_seed = rng::splitmix64(seed + 0x10000 + n);
    const auto xs = sample_scaled_passage(n, sampler, n_samples, row_seed, threads);
    Estimate e = log_mgf_estimate(lambda, xs, row_seed);
    const double inv_n = 1.0 / static_cast<double>(n);
    e.mean *= inv_n;
    e.std_error *= inv_n;
    e.ci_low *= inv_n;
    e.ci_high *= inv_n;
    LyapunovRow row{n, e, limit, e.mean <= limit + 2.0 * e.std_error};
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace bdp::estimator
