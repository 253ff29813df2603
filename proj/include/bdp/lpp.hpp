// SPDX-License-Identifier: Apache-2.0
//
// Discretised last passage times through Brownian lines.
//
// A path from (i0, line k) to (i1, line n) is a nondecreasing sequence of
// grid split points i0 = s_{k-1} <= s_k <= ... <= s_n = i1; it collects the
// steps s_{j-1} .. s_j - 1 of line j. Jumps happen at grid points, so every
// step is attributed to exactly one line.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "bdp/errors.hpp"
#include "bdp/parallel.hpp"
#include "bdp/paths.hpp"
#include "bdp/rng.hpp"
#include "bdp/stats.hpp"

namespace bdp::lpp {

/// L_{k,n}(t_{i0}, t_{i1}) on grid lines k..n. O((n-k+1)(i1-i0)) time,
/// O(i1-i0) memory.
inline double last_passage(const IncrementGrid& grid, std::size_t k, std::size_t i0, std::size_t n,
                           std::size_t i1) {
  if (k > n || n >= grid.n_lines()) throw DomainError("last_passage: line range out of bounds");
  if (i0 > i1 || i1 > grid.n_steps()) throw DomainError("last_passage: index range out of bounds");
  const std::size_t width = i1 - i0;
  // best[m]: best value of a path ending at grid point i0 + m on the current line.
  std::vector<double> best(width + 1, 0.0);
  const double* inc = grid.line(k).data() + i0;
  for (std::size_t m = 1; m <= width; ++m) best[m] = best[m - 1] + inc[m - 1];
  for (std::size_t j = k + 1; j <= n; ++j) {
    inc = grid.line(j).data() + i0;
    for (std::size_t m = 1; m <= width; ++m) best[m] = std::max(best[m], best[m - 1] + inc[m - 1]);
  }
  return best[width];
}

/// Passage times into the corner (t_end, line n) from every starting point on
/// line 1 and from every line at a fixed starting point.
struct PassageProfile {
  std::size_t first_index = 0;     ///< grid index of the first horizontal entry
  std::vector<double> horizontal;  ///< horizontal[m] = L_{1,n}(t_{first_index+m}, t_end)
  std::vector<double> vertical;    ///< vertical[j-1] = L_{j,n}(t_{first_index}, t_end), j = 1..n

  double from_point(std::size_t i) const { return horizontal.at(i - first_index); }
  double from_line(std::size_t j) const { return vertical.at(j - 1); }
};

/// One backward sweep over grid lines n, n-1, .., 1 on the window
/// [t_{i0}, t_end]. Line 0 of the grid is not read.
inline PassageProfile passage_profile(const IncrementGrid& grid, std::size_t n, std::size_t i0 = 0) {
  if (n == 0 || n >= grid.n_lines()) throw DomainError("passage_profile: grid must have lines 0..n");
  if (i0 > grid.n_steps()) throw DomainError("passage_profile: start index out of range");
  const std::size_t steps = grid.n_steps();
  const std::size_t width = steps - i0;

  PassageProfile p;
  p.first_index = i0;
  p.vertical.assign(n, 0.0);
  // to_end[m]: best value from grid point i0 + m on the current line to (t_end, n).
  std::vector<double> to_end(width + 1, 0.0);
  const double* inc = grid.line(n).data() + i0;
  for (std::size_t m = width; m-- > 0;) to_end[m] = to_end[m + 1] + inc[m];
  p.vertical[n - 1] = to_end[0];
  for (std::size_t j = n - 1; j >= 1; --j) {
    inc = grid.line(j).data() + i0;
    for (std::size_t m = width; m-- > 0;) to_end[m] = std::max(to_end[m], inc[m] + to_end[m + 1]);
    p.vertical[j - 1] = to_end[0];
  }
  p.horizontal = std::move(to_end);
  return p;
}

/// L_{floor(s1+s2)}(t1+t2) - L_{floor s1}(t1) - L_{floor s1, floor(s1+s2)}(t1, t1+t2)
/// on one realisation, with line m of the model stored as grid line m-1 and
/// times measured from the grid start. Concatenating optimal paths shows the
/// gap is never negative.
inline double superadditivity_gap(const IncrementGrid& grid, double s1, double s2, double t1,
                                  double t2) {
  if (!(s1 >= 1.0) || !(s2 >= 0.0) || !(t1 >= 0.0) || !(t2 >= 0.0)) {
    throw DomainError("superadditivity_gap: need s1 >= 1 and s2, t1, t2 >= 0");
  }
  const auto a = static_cast<std::size_t>(std::floor(s1));
  const auto b = static_cast<std::size_t>(std::floor(s1 + s2));
  const auto mid = grid.index_of(grid.t_start() + t1);
  const auto end = grid.index_of(grid.t_start() + t1 + t2);
  if (!mid || !end) throw DomainError("superadditivity_gap: times must be grid points");
  if (b > grid.n_lines()) throw DomainError("superadditivity_gap: grid has too few lines");
  const double whole = last_passage(grid, 0, 0, b - 1, *end);
  const double first = last_passage(grid, 0, 0, a - 1, *mid);
  const double second = last_passage(grid, a - 1, *mid, b - 1, *end);
  return whole - (first + second);
}

/// True iff the superadditivity inequality holds on this realisation, up to
/// floating-point reassociation (1e-12 relative to the path magnitudes).
inline bool superadditivity_check(const IncrementGrid& grid, double s1, double s2, double t1,
                                  double t2) {
  const double gap = superadditivity_gap(grid, s1, s2, t1, t2);
  return gap >= -1e-12 * (1.0 + std::sqrt(static_cast<double>(grid.n_steps())));
}

struct SuperadditivitySweep {
  std::size_t realisations = 0;
  std::size_t passed = 0;
  double min_gap = std::numeric_limits<double>::infinity();
};

/// superadditivity_check on `count` independent grids with random
/// s1 in [1, 4), s2 in [0, 3) and t1, t2 random multiples of delta.
inline SuperadditivitySweep superadditivity_sweep(std::uint64_t seed, std::size_t count, double delta = 0.01,
                                                  std::size_t max_steps = 200, std::size_t threads = 1) {
  if (max_steps < 2) throw DomainError("superadditivity_sweep: need max_steps >= 2");
  std::vector<double> gaps(count);
  std::vector<char> ok(count);
  parallel_for(count, threads, [&](std::size_t r) {
    rng::Stream s(rng::splitmix64(~seed), r);
    const double s1 = 1.0 + 3.0 * s.uniform();
    const double s2 = 3.0 * s.uniform();
    const std::size_t a = 1 + s() % (max_steps - 1);
    const std::size_t b = 1 + s() % (max_steps - a);
    const auto lines = static_cast<std::size_t>(std::floor(s1 + s2));
    const double t1 = static_cast<double>(a) * delta;
    const double t2 = static_cast<double>(b) * delta;
    const IncrementGrid g = make_grid(lines, 0.0, static_cast<double>(a + b) * delta, delta, seed, r);
    gaps[r] = superadditivity_gap(g, s1, s2, t1, t2);
    ok[r] = superadditivity_check(g, s1, s2, t1, t2);
  });
  SuperadditivitySweep out;
  out.realisations = count;
  for (std::size_t r = 0; r < count; ++r) {
    out.passed += ok[r] ? 1 : 0;
    out.min_gap = std::min(out.min_gap, gaps[r]);
  }
  return out;
}

/// Independent draws of L_n(horizon): replication r uses a grid of n lines
/// over [0, horizon] keyed by (seed, stream_offset + r).
inline std::vector<double> sample_passage_times(std::size_t n, double horizon, double delta,
                                                std::uint64_t seed, std::size_t count,
                                                std::size_t threads = 1,
                                                std::uint64_t stream_offset = 0) {
  if (n == 0) throw DomainError("sample_passage_times: n must be >= 1");
  const std::size_t steps = commensurate_steps(0.0, horizon, delta);
  check_memory(n * steps * std::min<std::size_t>(std::max<std::size_t>(threads, 1), count),
               "sample_passage_times");
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t r) {
    const IncrementGrid g = make_grid(n, 0.0, horizon, delta, seed, stream_offset + r);
    out[r] = last_passage(g, 0, 0, n - 1, g.n_steps());
  });
  return out;
}

/// Monte Carlo mean of L_n(n t) / n over `replications` independent grids.
/// The large-n limit is 2 sqrt(t).
inline Estimate lln_estimate(std::size_t n, double t, double delta, std::uint64_t seed,
                             std::size_t replications, std::size_t threads = 1) {
  if (n == 0 || !(t > 0.0)) throw DomainError("lln_estimate: need n >= 1 and t > 0");
  if (replications < 2) throw DomainError("lln_estimate: need at least two replications");
  auto samples = sample_passage_times(n, static_cast<double>(n) * t, delta, seed, replications, threads);
  for (double& x : samples) x /= static_cast<double>(n);
  return mean_estimate(samples);
}

}  // namespace bdp::lpp
