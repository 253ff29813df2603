// SPDX-License-Identifier: Apache-2.0
//
// The increment-stationary model: Brownian tandem queues fed by line 0,
// their departure processes, and the stationary passage times L_n^mu.
//
// The supremum over (-inf, t] in the queue definitions is truncated to
// [t_start, t] = [-T, t] with every queue empty at -T. Under that convention
// the discrete identities
//
//   sum_k q_k(t) = B_0(t) - mu t + L_n^mu(t)
//   L_n^mu(t)    = max(boundary branch, vertical branch)
//
// hold exactly on every realisation, up to floating-point reassociation.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bdp/errors.hpp"
#include "bdp/lpp.hpp"
#include "bdp/parallel.hpp"
#include "bdp/paths.hpp"
#include "bdp/rng.hpp"
#include "bdp/stats.hpp"

namespace bdp::stationary {

enum class InitMode { zero, exponential };

/// Queue lengths q_k(t_i) for stations k = 1..n at every grid point.
struct QueueTrajectory {
  double mu = 1.0;
  double horizon = 0.0;  ///< T, with the grid starting at -T
  std::size_t n_stations = 0;
  std::size_t n_points = 0;
  InitMode init_mode = InitMode::zero;
  std::vector<double> q;  ///< row-major [k-1][i]

  double at(std::size_t k, std::size_t i) const { return q.at((k - 1) * n_points + i); }
};

/// Departure increments d_k(t_i, t_{i+1}) for stations k = 1..n.
struct DepartureIncrements {
  std::size_t n_stations = 0;
  std::size_t n_steps = 0;
  std::vector<double> d;  ///< row-major [k-1][step]

  double at(std::size_t k, std::size_t step) const { return d.at((k - 1) * n_steps + step); }
};

struct QueueEvolution {
  QueueTrajectory queues;
  DepartureIncrements departures;
};

namespace detail {

inline void require_stations(const IncrementGrid& grid, const char* what) {
  if (grid.n_lines() < 2) throw DomainError(std::string(what) + ": grid needs line 0 and at least one station");
}

inline void require_mu(double mu, const char* what) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError(std::string(what) + ": mu must be positive");
}

inline std::size_t zero_index(const IncrementGrid& grid, const char* what) {
  const auto z = grid.index_of(0.0);
  if (!z) throw DomainError(std::string(what) + ": time 0 must be a grid point");
  return *z;
}

/// Initial queue lengths at t_start: zeros, or i.i.d. Exponential(mean 1/mu)
/// drawn from the grid's (seed, stream) in the initial-condition domain.
inline std::vector<double> initial_queues(const IncrementGrid& grid, std::size_t n, double mu,
                                          InitMode mode) {
  std::vector<double> init(n, 0.0);
  if (mode == InitMode::exponential) {
    rng::Stream s(grid.seed(), grid.stream_id(), rng::Domain::initial);
    for (double& x : init) x = s.exponential(1.0 / mu);
  }
  return init;
}

/// Lindley sweep of one station. `input` holds the arrival increments on
/// entry and the departure increments on exit. Calls on_point(i, q) for
/// every grid point.
template <class OnPoint>
void sweep_station(std::span<double> input, std::span<const double> service, double drift_step,
                   double q0, OnPoint&& on_point) {
  double q = q0;
  on_point(std::size_t{0}, q);
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double arrivals = input[i];
    const double next = std::max(0.0, q + arrivals + service[i] - drift_step);
    input[i] = arrivals + q - next;
    q = next;
    on_point(i + 1, q);
  }
}

}  // namespace detail

/// Tandem-queue evolution on a grid spanning [-T, t_end] with lines 0..n:
///   q_k[i+1] = max(0, q_k[i] + dIn_k[i] + dB_k[i] - mu delta)
///   dd_k[i]  = dIn_k[i] + q_k[i] - q_k[i+1]
/// where dIn_1 = dB_0 and dIn_k = dd_{k-1}.
inline QueueEvolution queue_evolution(const IncrementGrid& grid, double mu,
                                      InitMode init_mode = InitMode::zero) {
  detail::require_stations(grid, "queue_evolution");
  detail::require_mu(mu, "queue_evolution");
  const std::size_t n = grid.n_lines() - 1;
  const std::size_t steps = grid.n_steps();
  check_memory(n * (2 * steps + 1), "queue_evolution");

  QueueEvolution out;
  auto& traj = out.queues;
  traj.mu = mu;
  traj.horizon = -grid.t_start();
  traj.n_stations = n;
  traj.n_points = steps + 1;
  traj.init_mode = init_mode;
  traj.q.resize(n * (steps + 1));
  out.departures.n_stations = n;
  out.departures.n_steps = steps;
  out.departures.d.resize(n * steps);

  const auto init = detail::initial_queues(grid, n, mu, init_mode);
  std::vector<double> flow(grid.line(0).begin(), grid.line(0).end());
  const double drift_step = mu * grid.delta();
  for (std::size_t k = 1; k <= n; ++k) {
    double* row = traj.q.data() + (k - 1) * (steps + 1);
    detail::sweep_station(flow, grid.line(k), drift_step, init[k - 1],
                          [row](std::size_t i, double q) { row[i] = q; });
    std::copy(flow.begin(), flow.end(), out.departures.d.begin() + static_cast<std::ptrdiff_t>((k - 1) * steps));
  }
  return out;
}

/// Queue lengths of every station at the requested grid indices, in O(steps)
/// memory. Result is [k-1][position in `indices`].
inline std::vector<std::vector<double>> queue_lengths_at(const IncrementGrid& grid, double mu,
                                                         InitMode init_mode,
                                                         const std::vector<std::size_t>& indices) {
  detail::require_stations(grid, "queue_lengths_at");
  detail::require_mu(mu, "queue_lengths_at");
  for (std::size_t i : indices) {
    if (i > grid.n_steps()) throw DomainError("queue_lengths_at: index out of range");
  }
  const std::size_t n = grid.n_lines() - 1;
  const auto init = detail::initial_queues(grid, n, mu, init_mode);
  std::vector<double> flow(grid.line(0).begin(), grid.line(0).end());
  std::vector<double> path(grid.n_steps() + 1);
  std::vector<std::vector<double>> out(n, std::vector<double>(indices.size()));
  for (std::size_t k = 1; k <= n; ++k) {
    detail::sweep_station(flow, grid.line(k), mu * grid.delta(), init[k - 1],
                          [&path](std::size_t i, double q) { path[i] = q; });
    for (std::size_t m = 0; m < indices.size(); ++m) out[k - 1][m] = path[indices[m]];
  }
  return out;
}

/// Boundary weights mu t_i - B_0(t_i), with B_0 pinned to zero at time 0.
inline std::vector<double> boundary_weights(const IncrementGrid& grid, double mu) {
  const std::size_t z = detail::zero_index(grid, "boundary_weights");
  const auto line0 = grid.line(0);
  std::vector<double> b0(grid.n_steps() + 1, 0.0);
  for (std::size_t i = 0; i < line0.size(); ++i) b0[i + 1] = b0[i] + line0[i];
  const double pin = b0[z];
  std::vector<double> w(b0.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = mu * grid.time(i) - (b0[i] - pin);
  return w;
}

/// B_0(t_end) with B_0(0) = 0.
inline double boundary_endpoint(const IncrementGrid& grid) {
  const std::size_t z = detail::zero_index(grid, "boundary_endpoint");
  return partial_sum(grid, 0, z, grid.n_steps());
}

/// L_n^mu(t_end): max over grid points s_0 of mu s_0 - B_0(s_0) + L_{1,n}(s_0, t_end),
/// read off one backward passage profile.
inline double stationary_passage(const IncrementGrid& grid, double mu, std::size_t n) {
  detail::require_mu(mu, "stationary_passage");
  if (n == 0 || n >= grid.n_lines()) throw DomainError("stationary_passage: grid must have lines 0..n");
  const auto w = boundary_weights(grid, mu);
  const auto profile = lpp::passage_profile(grid, n, 0);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) best = std::max(best, w[i] + profile.horizontal[i]);
  return best;
}

/// L_j^mu(t_index) for j = 1..n by a forward sweep whose line-0 values are the
/// boundary weights. Entry j-1 holds L_j^mu.
inline std::vector<double> stationary_passages_at(const IncrementGrid& grid, double mu, std::size_t n,
                                                  std::size_t index) {
  detail::require_mu(mu, "stationary_passages_at");
  if (n == 0 || n >= grid.n_lines()) throw DomainError("stationary_passages_at: grid must have lines 0..n");
  if (index > grid.n_steps()) throw DomainError("stationary_passages_at: index out of range");
  auto best = boundary_weights(grid, mu);
  best.resize(index + 1);
  std::vector<double> out(n);
  for (std::size_t j = 1; j <= n; ++j) {
    const double* inc = grid.line(j).data();
    for (std::size_t i = 1; i <= index; ++i) best[i] = std::max(best[i], best[i - 1] + inc[i - 1]);
    out[j - 1] = best[index];
  }
  return out;
}

/// |sum_k q_k(t_end) - (B_0(t_end) - mu t_end + L_n^mu(t_end))| with queues
/// empty at t_start. The identity acquires a boundary term under any other
/// initial condition, so exponential initialisation is rejected.
inline double decomposition_residual(const IncrementGrid& grid, double mu, std::size_t n,
                                     InitMode init_mode = InitMode::zero) {
  if (init_mode != InitMode::zero) {
    throw ContractError("decomposition_residual: identity holds only with empty initial queues");
  }
  if (n == 0 || n >= grid.n_lines()) throw DomainError("decomposition_residual: grid must have lines 0..n");
  const auto q = queue_lengths_at(grid, mu, InitMode::zero, {grid.n_steps()});
  double queue_total = 0.0;
  for (std::size_t k = 0; k < n; ++k) queue_total += q[k][0];
  const double rhs = boundary_endpoint(grid) - mu * grid.t_end() + stationary_passage(grid, mu, n);
  return std::abs(queue_total - rhs);
}

struct CouplingBranches {
  double stationary;  ///< L_n^mu(t_end)
  double boundary;    ///< max over s_0 in [0, t_end]
  double vertical;    ///< max over j of L_j^mu(0) + L_{j,n}(0, t_end)
};

/// The two branches of the decomposition of L_n^mu(t_end) by where a path
/// crosses time 0, each computed by its own sweep.
inline CouplingBranches coupling_branches(const IncrementGrid& grid, double mu, std::size_t n) {
  const std::size_t z = detail::zero_index(grid, "coupling_check");
  if (n == 0 || n >= grid.n_lines()) throw DomainError("coupling_check: grid must have lines 0..n");
  CouplingBranches b{};
  b.stationary = stationary_passage(grid, mu, n);

  const auto w = boundary_weights(grid, mu);
  const auto after = lpp::passage_profile(grid, n, z);
  b.boundary = -std::numeric_limits<double>::infinity();
  for (std::size_t i = z; i < w.size(); ++i) b.boundary = std::max(b.boundary, w[i] + after.from_point(i));

  const auto at_zero = stationary_passages_at(grid, mu, n, z);
  b.vertical = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j <= n; ++j) b.vertical = std::max(b.vertical, at_zero[j - 1] + after.from_line(j));
  return b;
}

/// |L_n^mu(t_end) - max(boundary branch, vertical branch)|.
inline double coupling_check(const IncrementGrid& grid, double mu, std::size_t n) {
  const auto b = coupling_branches(grid, mu, n);
  return std::abs(b.stationary - std::max(b.boundary, b.vertical));
}

/// A small random grid for pathwise checks: 1..max_stations stations, 2..max_steps
/// steps of a random width straddling time 0, and a random service rate.
struct CheckCase {
  IncrementGrid grid;
  double mu;
  std::size_t n;
};

inline CheckCase random_check_case(std::uint64_t seed, std::uint64_t index, std::size_t max_stations,
                                   std::size_t max_steps) {
  if (max_stations == 0 || max_steps < 2) throw DomainError("random_check_case: grid too small");
  rng::Stream s(rng::splitmix64(~seed), index);  // shape draws, apart from the grid streams
  const std::size_t n = 1 + s() % max_stations;
  const std::size_t steps = 2 + s() % (max_steps - 1);
  const std::size_t before = 1 + s() % (steps - 1);
  const double delta = 0.05 + 0.45 * s.uniform();
  const double mu = 0.2 + 2.8 * s.uniform();
  const double t_start = -static_cast<double>(before) * delta;
  const double t_end = static_cast<double>(steps - before) * delta;
  return {make_grid(n + 1, t_start, t_end, delta, seed, index), mu, n};
}

struct PathwiseSweep {
  std::size_t grids = 0;
  double max_decomposition = 0.0;
  double max_coupling = 0.0;
};

/// decomposition_residual and coupling_check over `count` random check cases.
inline PathwiseSweep pathwise_sweep(std::uint64_t seed, std::size_t count, std::size_t max_stations,
                                    std::size_t max_steps, std::size_t threads = 1) {
  std::vector<double> dec(count);
  std::vector<double> cpl(count);
  parallel_for(count, threads, [&](std::size_t r) {
    const auto c = random_check_case(seed, r, max_stations, max_steps);
    dec[r] = decomposition_residual(c.grid, c.mu, c.n);
    cpl[r] = coupling_check(c.grid, c.mu, c.n);
  });
  PathwiseSweep out;
  out.grids = count;
  for (std::size_t r = 0; r < count; ++r) {
    out.max_decomposition = std::max(out.max_decomposition, dec[r]);
    out.max_coupling = std::max(out.max_coupling, cpl[r]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Statistical check of the Burke property.

struct BurkeReport {
  double mu = 1.0;
  std::size_t n_stations = 0;
  std::size_t n_seeds = 0;
  double horizon = 0.0;
  double delta = 0.0;
  InitMode init_mode = InitMode::zero;

  std::vector<double> station_means;
  double mean_standard_error = 0.0;  ///< (1/mu) / sqrt(n_seeds), the null standard error
  double max_abs_mean_z = 0.0;

  KsResult pooled_ks{};
  double pooled_mean = 0.0;
  double zero_fraction = 0.0;  ///< share of samples exactly at 0

  std::vector<double> lag1_correlations;
  double max_abs_correlation = 0.0;
  double correlation_standard_error = 0.0;  ///< 1 / sqrt(n_seeds)

  bool ks_pass = false;
  bool means_pass = false;
  bool correlation_pass = false;
  bool pass() const { return ks_pass && means_pass && correlation_pass; }
};

/// Queue lengths at time 0 of `n_stations` tandem stations over [-T, 0] for
/// `n_seeds` independent grids (stream r for seed index r), tested against
/// i.i.d. Exponential(mean 1/mu): pooled one-sample KS at p > `alpha`,
/// per-station means within 4 null standard errors, and adjacent-station
/// correlations within 4 standard errors of zero.
inline BurkeReport burke_test(double mu, std::size_t n_stations, double horizon, double delta,
                              std::uint64_t seed, std::size_t n_seeds,
                              InitMode init_mode = InitMode::exponential, std::size_t threads = 1,
                              double alpha = 0.01) {
  detail::require_mu(mu, "burke_test");
  if (n_stations == 0) throw DomainError("burke_test: need at least one station");
  if (n_stations * n_seeds < 100) throw DomainError("burke_test: fewer than 100 pooled samples");
  if (n_seeds < 3) throw DomainError("burke_test: need at least three seeds");
  const std::size_t steps = commensurate_steps(-horizon, 0.0, delta);
  check_memory((n_stations + 1) * steps * std::min(std::max<std::size_t>(threads, 1), n_seeds),
               "burke_test");

  // samples[r][k-1] = q_k(0) on replication r.
  std::vector<std::vector<double>> samples(n_seeds);
  parallel_for(n_seeds, threads, [&](std::size_t r) {
    const IncrementGrid g = make_grid(n_stations + 1, -horizon, 0.0, delta, seed, r);
    const auto q = queue_lengths_at(g, mu, init_mode, {g.n_steps()});
    samples[r].resize(n_stations);
    for (std::size_t k = 0; k < n_stations; ++k) samples[r][k] = q[k][0];
  });

  BurkeReport rep;
  rep.mu = mu;
  rep.n_stations = n_stations;
  rep.n_seeds = n_seeds;
  rep.horizon = horizon;
  rep.delta = delta;
  rep.init_mode = init_mode;

  std::vector<double> pooled;
  pooled.reserve(n_stations * n_seeds);
  for (const auto& row : samples) pooled.insert(pooled.end(), row.begin(), row.end());
  rep.pooled_ks = ks_exponential(pooled, 1.0 / mu);
  rep.pooled_mean = pairwise_sum(pooled) / static_cast<double>(pooled.size());
  rep.zero_fraction = static_cast<double>(std::count(pooled.begin(), pooled.end(), 0.0)) /
                      static_cast<double>(pooled.size());

  const double m = static_cast<double>(n_seeds);
  rep.mean_standard_error = (1.0 / mu) / std::sqrt(m);
  std::vector<std::vector<double>> by_station(n_stations, std::vector<double>(n_seeds));
  for (std::size_t r = 0; r < n_seeds; ++r) {
    for (std::size_t k = 0; k < n_stations; ++k) by_station[k][r] = samples[r][k];
  }
  rep.station_means.resize(n_stations);
  for (std::size_t k = 0; k < n_stations; ++k) {
    rep.station_means[k] = pairwise_sum(by_station[k]) / m;
    rep.max_abs_mean_z =
        std::max(rep.max_abs_mean_z, std::abs(rep.station_means[k] - 1.0 / mu) / rep.mean_standard_error);
  }

  rep.correlation_standard_error = 1.0 / std::sqrt(m);
  for (std::size_t k = 0; k + 1 < n_stations; ++k) {
    const double rho = correlation(by_station[k], by_station[k + 1]);
    rep.lag1_correlations.push_back(rho);
    rep.max_abs_correlation = std::max(rep.max_abs_correlation, std::abs(rho));
  }

  rep.ks_pass = rep.pooled_ks.p_value > alpha;
  rep.means_pass = rep.max_abs_mean_z <= 4.0;
  rep.correlation_pass = rep.max_abs_correlation <= 4.0 * rep.correlation_standard_error;
  return rep;
}

}  // namespace bdp::stationary
