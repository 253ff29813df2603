// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bdp/errors.hpp"
#include "bdp/rng.hpp"

namespace bdp {

inline constexpr std::size_t kDefaultMemoryCapBytes = std::size_t{2} << 30;

/// Memory cap for materialised grids: BDP_MEM_CAP_BYTES if set, else 2 GiB.
inline std::size_t memory_cap_bytes() {
  if (const char* env = std::getenv("BDP_MEM_CAP_BYTES"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0') return static_cast<std::size_t>(v);
  }
  return kDefaultMemoryCapBytes;
}

inline void check_memory(std::size_t doubles, const char* what) {
  const std::size_t cap = memory_cap_bytes();
  if (doubles > cap / sizeof(double)) {
    throw ResourceError(std::string(what) + ": request of " + std::to_string(doubles * sizeof(double)) +
                        " bytes exceeds memory cap of " + std::to_string(cap) + " bytes");
  }
}

/// Number of grid steps covering [t_start, t_end] at spacing delta. Throws
/// unless the width is an integer multiple of delta to 1e-9 relative.
inline std::size_t commensurate_steps(double t_start, double t_end, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("grid: delta must be positive");
  if (!(t_end > t_start)) throw DomainError("grid: requires t_end > t_start");
  const double ratio = (t_end - t_start) / delta;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw DomainError("grid: window width is not an integer multiple of delta");
  }
  return static_cast<std::size_t>(steps);
}

/// Discretised independent Brownian lines on a common time grid
/// t_i = t_start + i * delta, i = 0..n_steps. Step i is the increment of a
/// line over (t_i, t_{i+1}], Gaussian with variance delta. Immutable once
/// built.
class IncrementGrid {
 public:
  /// Build from explicit increments (rows are lines), mainly for tests.
  static IncrementGrid from_matrix(std::vector<std::vector<double>> rows, double t_start,
                                   double delta) {
    if (rows.empty() || rows.front().empty()) throw DomainError("IncrementGrid: empty matrix");
    if (!(delta > 0.0)) throw DomainError("IncrementGrid: delta must be positive");
    const std::size_t steps = rows.front().size();
    IncrementGrid g;
    g.n_lines_ = rows.size();
    g.n_steps_ = steps;
    g.t_start_ = t_start;
    g.delta_ = delta;
    g.data_.reserve(g.n_lines_ * steps);
    for (const auto& row : rows) {
      if (row.size() != steps) throw DomainError("IncrementGrid: ragged matrix");
      g.data_.insert(g.data_.end(), row.begin(), row.end());
    }
    return g;
  }

  std::size_t n_lines() const noexcept { return n_lines_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_start_ + static_cast<double>(n_steps_) * delta_; }
  double delta() const noexcept { return delta_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double time(std::size_t i) const noexcept { return t_start_ + static_cast<double>(i) * delta_; }

  /// Grid index of time `t`, if `t` is a grid point (to 1e-9 steps).
  std::optional<std::size_t> index_of(double t) const noexcept {
    const double x = (t - t_start_) / delta_;
    const double k = std::round(x);
    if (k < 0.0 || k > static_cast<double>(n_steps_) || std::abs(x - k) > 1e-9) return std::nullopt;
    return static_cast<std::size_t>(k);
  }

  std::span<const double> line(std::size_t j) const {
    if (j >= n_lines_) throw DomainError("IncrementGrid::line: line index out of range");
    return {data_.data() + j * n_steps_, n_steps_};
  }

  double increment(std::size_t j, std::size_t step) const noexcept {
    return data_[j * n_steps_ + step];
  }

 private:
  friend IncrementGrid make_grid(std::size_t, double, double, double, std::uint64_t, std::uint64_t);
  friend IncrementGrid refine(const IncrementGrid&, std::uint64_t);

  IncrementGrid() = default;

  std::size_t n_lines_ = 0;
  std::size_t n_steps_ = 0;
  double t_start_ = 0.0;
  double delta_ = 1.0;
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::vector<double> data_;
};

/// Gaussian increment grid; a pure function of its arguments. The draw for
/// (line j, step i) is the Philox block (i/2, j) keyed by (seed, stream_id),
/// mapped through the normal quantile.
inline IncrementGrid make_grid(std::size_t n_lines, double t_start, double t_end, double delta,
                               std::uint64_t seed, std::uint64_t stream_id) {
  if (n_lines == 0) throw DomainError("make_grid: need at least one line");
  const std::size_t steps = commensurate_steps(t_start, t_end, delta);
  if (steps > (std::size_t{1} << 40)) throw ResourceError("make_grid: too many steps");
  check_memory(n_lines * steps, "make_grid");

  IncrementGrid g;
  g.n_lines_ = n_lines;
  g.n_steps_ = steps;
  g.t_start_ = t_start;
  g.delta_ = delta;
  g.seed_ = seed;
  g.stream_id_ = stream_id;
  g.data_.resize(n_lines * steps);

  const rng::Key key = rng::derive_key(seed, stream_id);
  const double sd = std::sqrt(delta);
  constexpr auto domain = static_cast<std::uint32_t>(rng::Domain::grid);
  for (std::size_t j = 0; j < n_lines; ++j) {
    double* row = g.data_.data() + j * steps;
    for (std::size_t i = 0; i < steps; i += 2) {
      const std::uint64_t block = i / 2;
      const auto z = rng::normal_pair({static_cast<std::uint32_t>(block),
                                       static_cast<std::uint32_t>(block >> 32),
                                       static_cast<std::uint32_t>(j), domain},
                                      key);
      row[i] = sd * z[0];
      if (i + 1 < steps) row[i + 1] = sd * z[1];
    }
  }
  return g;
}

/// Halve the step of a grid by Brownian-bridge midpoints: each increment X
/// over a step of length delta splits into X/2 + (sqrt(delta)/2) Z and
/// X/2 - (sqrt(delta)/2) Z. The coarse grid is a subgrid of the result, so
/// every coarse path is also a fine path.
inline IncrementGrid refine(const IncrementGrid& coarse, std::uint64_t stream_id) {
  check_memory(2 * coarse.n_lines_ * coarse.n_steps_, "refine");
  IncrementGrid g;
  g.n_lines_ = coarse.n_lines_;
  g.n_steps_ = 2 * coarse.n_steps_;
  g.t_start_ = coarse.t_start_;
  g.delta_ = 0.5 * coarse.delta_;
  g.seed_ = coarse.seed_;
  g.stream_id_ = stream_id;
  g.data_.resize(g.n_lines_ * g.n_steps_);

  const rng::Key key = rng::derive_key(coarse.seed_, stream_id);
  const double half_sd = 0.5 * std::sqrt(coarse.delta_);
  constexpr auto domain = static_cast<std::uint32_t>(rng::Domain::refinement);
  for (std::size_t j = 0; j < g.n_lines_; ++j) {
    const double* src = coarse.data_.data() + j * coarse.n_steps_;
    double* dst = g.data_.data() + j * g.n_steps_;
    for (std::size_t i = 0; i < coarse.n_steps_; i += 2) {
      const std::uint64_t block = i / 2;
      const auto z = rng::normal_pair({static_cast<std::uint32_t>(block),
                                       static_cast<std::uint32_t>(block >> 32),
                                       static_cast<std::uint32_t>(j), domain},
                                      key);
      for (std::size_t h = 0; h < 2 && i + h < coarse.n_steps_; ++h) {
        const double x = src[i + h];
        const double noise = half_sd * z[h];
        dst[2 * (i + h)] = 0.5 * x + noise;
        dst[2 * (i + h) + 1] = 0.5 * x - noise;
      }
    }
  }
  return g;
}

/// B_line(t_{i0}, t_{i1}): the sum of steps i0 .. i1-1, left to right.
inline double partial_sum(const IncrementGrid& grid, std::size_t line, std::size_t i0,
                          std::size_t i1) {
  if (line >= grid.n_lines()) throw DomainError("partial_sum: line index out of range");
  if (i0 > i1 || i1 > grid.n_steps()) throw DomainError("partial_sum: index out of range");
  double sum = 0.0;
  for (std::size_t i = i0; i < i1; ++i) sum += grid.increment(line, i);
  return sum;
}

}  // namespace bdp
