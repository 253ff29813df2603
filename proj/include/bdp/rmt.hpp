// SPDX-License-Identifier: Apache-2.0
//
// Largest eigenvalue of the Gaussian Unitary Ensemble, normalised so that
// it has the law of the Brownian last passage time L_n(1): density
// proportional to exp(-tr H^2 / 2), i.e. diagonal entries N(0, 1) and
// off-diagonal entries with E|H_ij|^2 = 1. For n = 1 this is N(0, 1) = B_1(1).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bdp/errors.hpp"
#include "bdp/lpp.hpp"
#include "bdp/parallel.hpp"
#include "bdp/paths.hpp"
#include "bdp/rng.hpp"
#include "bdp/stats.hpp"

namespace bdp::rmt {

inline constexpr const char* kGueNormalization = "beta=2 Hermite, density ~ exp(-tr H^2/2)";

/// Symmetric tridiagonal matrix whose spectrum has the GUE law
/// (Dumitriu-Edelman model): diagonal N(0, 1), off-diagonal
/// sqrt(Gamma(n-1)), ..., sqrt(Gamma(1)).
struct TridiagonalEnsembleSample {
  std::size_t n = 0;
  std::vector<double> diagonal;
  std::vector<double> offdiagonal;
  std::string normalization = kGueNormalization;
};

/// Number of eigenvalues strictly below x (Sturm sequence count).
inline std::size_t count_below(std::span<const double> diagonal, std::span<const double> offdiagonal,
                               double x) {
  constexpr double kTiny = 1e-300;
  std::size_t count = 0;
  double d = diagonal[0] - x;
  if (d < 0.0) ++count;
  for (std::size_t i = 1; i < diagonal.size(); ++i) {
    if (d == 0.0) d = -kTiny;
    d = diagonal[i] - x - offdiagonal[i - 1] * offdiagonal[i - 1] / d;
    if (d < 0.0) ++count;
  }
  return count;
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm-sequence
/// bisection inside the Gershgorin interval, to absolute tolerance `tol`.
inline double largest_eigenvalue(std::span<const double> diagonal, std::span<const double> offdiagonal,
                                 double tol = 1e-10) {
  const std::size_t n = diagonal.size();
  if (n == 0) throw DomainError("largest_eigenvalue: empty matrix");
  if (offdiagonal.size() + 1 != n) throw DomainError("largest_eigenvalue: offdiagonal must have n-1 entries");
  if (n == 1) return diagonal[0];

  double lo = diagonal[0];
  double hi = diagonal[0];
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::abs(offdiagonal[i - 1]) : 0.0) +
                          (i + 1 < n ? std::abs(offdiagonal[i]) : 0.0);
    lo = std::min(lo, diagonal[i] - radius);
    hi = std::max(hi, diagonal[i] + radius);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("largest_eigenvalue: non-finite entries");
  // Invariant: count_below(lo) < n <= count_below(hi).
  hi += tol;
  constexpr int kMaxIterations = 300;
  for (int it = 0; it < kMaxIterations; ++it) {
    if (hi - lo <= tol) return 0.5 * (lo + hi);
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) return mid;
    if (count_below(diagonal, offdiagonal, mid) == n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  throw SolverError("largest_eigenvalue: bisection did not converge", 0.5 * (lo + hi), 0.0);
}

inline TridiagonalEnsembleSample sample_gue_tridiagonal(std::size_t n, std::uint64_t seed,
                                                        std::uint64_t stream_id) {
  if (n == 0) throw DomainError("sample_gue_tridiagonal: n must be >= 1");
  rng::Stream s(seed, stream_id);
  TridiagonalEnsembleSample m;
  m.n = n;
  m.diagonal.resize(n);
  m.offdiagonal.resize(n - 1);
  for (double& a : m.diagonal) a = s.normal();
  // chi_{2k} / sqrt(2) squared is Gamma(k, 1).
  for (std::size_t i = 0; i + 1 < n; ++i) m.offdiagonal[i] = std::sqrt(s.gamma(static_cast<double>(n - 1 - i)));
  return m;
}

/// One draw of the largest GUE eigenvalue, equal in law to L_n(1).
inline double sample_gue_lmax(std::size_t n, std::uint64_t seed, std::uint64_t stream_id) {
  const auto m = sample_gue_tridiagonal(n, seed, stream_id);
  return largest_eigenvalue(m.diagonal, m.offdiagonal);
}

/// `count` independent draws; draw r uses stream stream_offset + r.
inline std::vector<double> sample_gue_lmax_batch(std::size_t n, std::size_t count, std::uint64_t seed,
                                                 std::size_t threads = 1, std::uint64_t stream_offset = 0) {
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t r) { out[r] = sample_gue_lmax(n, seed, stream_offset + r); });
  return out;
}

/// Seed for the GUE side of a comparison, decorrelated from the LPP side.
constexpr std::uint64_t gue_seed(std::uint64_t seed) noexcept {
  return rng::splitmix64(seed ^ 0x47554521u);
}

struct GueComparison {
  std::size_t n = 0;
  std::size_t n_samples = 0;
  std::vector<double> deltas;           ///< one entry per refinement level
  std::vector<KsResult> ks;             ///< LPP at deltas[l] against the GUE sample
  std::vector<double> lpp_means;
  double gue_mean = 0.0;
};

/// Two-sample KS between draws of L_n(1) on a delta-grid and draws of the
/// largest GUE eigenvalue. With `levels` > 0 each LPP grid is further refined
/// by Brownian-bridge midpoints, halving delta per level; the same GUE
/// sample is reused at every level, so refinement effects are not confounded
/// with sampling noise on the GUE side.
inline GueComparison gue_vs_lpp(std::size_t n, std::size_t n_samples, double delta, std::uint64_t seed,
                                std::size_t levels = 0, std::size_t threads = 1) {
  if (n == 0 || n_samples == 0) throw DomainError("gue_vs_lpp: need n >= 1 and samples >= 1");
  const std::size_t steps = commensurate_steps(0.0, 1.0, delta);
  check_memory(n * steps * (std::size_t{1} << (levels + 1)) * std::min(std::max<std::size_t>(threads, 1), n_samples),
               "gue_vs_lpp");

  GueComparison out;
  out.n = n;
  out.n_samples = n_samples;
  std::vector<std::vector<double>> lpp(levels + 1, std::vector<double>(n_samples));
  parallel_for(n_samples, threads, [&](std::size_t r) {
    IncrementGrid g = make_grid(n, 0.0, 1.0, delta, seed, r);
    lpp[0][r] = lpp::last_passage(g, 0, 0, n - 1, g.n_steps());
    for (std::size_t l = 1; l <= levels; ++l) {
      g = refine(g, (static_cast<std::uint64_t>(l) << 48) + r);
      lpp[l][r] = lpp::last_passage(g, 0, 0, n - 1, g.n_steps());
    }
  });
  const auto gue = sample_gue_lmax_batch(n, n_samples, gue_seed(seed), threads);
  out.gue_mean = pairwise_sum(gue) / static_cast<double>(n_samples);
  for (std::size_t l = 0; l <= levels; ++l) {
    out.deltas.push_back(delta / static_cast<double>(std::size_t{1} << l));
    out.ks.push_back(ks_two_sample(lpp[l], gue));
    out.lpp_means.push_back(pairwise_sum(lpp[l]) / static_cast<double>(n_samples));
  }
  return out;
}

}  // namespace bdp::rmt
