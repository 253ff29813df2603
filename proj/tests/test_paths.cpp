// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <cstdlib>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "bdp/paths.hpp"
#include "bdp/stats.hpp"

namespace {

using bdp::IncrementGrid;
using bdp::make_grid;

TEST(Grid, Shape) {
  const auto g = make_grid(3, -1.0, 2.0, 0.01, 1, 0);
  EXPECT_EQ(g.n_lines(), 3u);
  EXPECT_EQ(g.n_steps(), 300u);
  EXPECT_NEAR(g.t_end(), 2.0, 1e-12);
  EXPECT_EQ(g.index_of(0.0), 100u);
  EXPECT_FALSE(g.index_of(0.005).has_value());
  EXPECT_FALSE(g.index_of(2.5).has_value());
}

TEST(Grid, RejectsIncommensurate) {
  EXPECT_THROW(make_grid(1, 0.0, 1.0, 0.3, 1, 0), bdp::DomainError);
  EXPECT_THROW(make_grid(1, 0.0, 1.0, -0.1, 1, 0), bdp::DomainError);
  EXPECT_THROW(make_grid(1, 1.0, 1.0, 0.1, 1, 0), bdp::DomainError);
  EXPECT_THROW(make_grid(0, 0.0, 1.0, 0.1, 1, 0), bdp::DomainError);
  EXPECT_NO_THROW(make_grid(1, 0.0, 1.0, 1e-3, 1, 0));
}

TEST(Grid, PureFunctionOfArguments) {
  const auto a = make_grid(2, 0.0, 1.0, 0.01, 11, 3);
  const auto b = make_grid(2, 0.0, 1.0, 0.01, 11, 3);
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t i = 0; i < a.n_steps(); ++i) EXPECT_EQ(a.increment(j, i), b.increment(j, i));
  }
  // A longer grid with the same key extends the shorter one.
  const auto c = make_grid(2, 0.0, 2.0, 0.01, 11, 3);
  for (std::size_t i = 0; i < a.n_steps(); ++i) EXPECT_EQ(a.increment(1, i), c.increment(1, i));
}

TEST(Grid, IncrementVarianceAndIndependence) {
  const double delta = 0.01;
  const auto g = make_grid(4, 0.0, 500.0, delta, 5, 0);
  const boost::math::normal_distribution<double> nd(0.0, std::sqrt(delta));
  for (std::size_t j = 0; j < 4; ++j) {
    const auto line = g.line(j);
    const auto ks = bdp::ks_one_sample(line, [&](double x) { return boost::math::cdf(nd, x); });
    EXPECT_GT(ks.p_value, 0.001) << "line " << j;
    double ss = 0;
    for (double x : line) ss += x * x;
    EXPECT_NEAR(ss / line.size(), delta, 5 * delta * std::sqrt(2.0 / line.size()));
  }
  const double se = 1.0 / std::sqrt(static_cast<double>(g.n_steps()));
  EXPECT_LT(std::abs(bdp::correlation(g.line(0), g.line(1))), 4 * se);
  std::vector<double> a(g.line(0).begin(), g.line(0).end() - 1);
  std::vector<double> b(g.line(0).begin() + 1, g.line(0).end());
  EXPECT_LT(std::abs(bdp::correlation(a, b)), 4 * se);
}

TEST(Grid, StreamsIndependent) {
  const auto a = make_grid(1, 0.0, 100.0, 0.01, 5, 0);
  const auto b = make_grid(1, 0.0, 100.0, 0.01, 5, 1);
  EXPECT_LT(std::abs(bdp::correlation(a.line(0), b.line(0))), 4.0 / std::sqrt(10000.0));
}

TEST(Grid, BrownianScaling) {
  // B(1) across replications is N(0, 1) whatever the step.
  for (double delta : {0.1, 0.01}) {
    std::vector<double> ends;
    for (std::uint64_t r = 0; r < 4000; ++r) {
      const auto g = make_grid(1, 0.0, 1.0, delta, 8, r);
      ends.push_back(bdp::partial_sum(g, 0, 0, g.n_steps()));
    }
    const boost::math::normal_distribution<double> nd;
    EXPECT_GT(bdp::ks_one_sample(ends, [&](double x) { return boost::math::cdf(nd, x); }).p_value, 0.001);
  }
}

TEST(Refine, CoarseIsSubgrid) {
  const auto coarse = make_grid(3, 0.0, 1.0, 0.01, 4, 0);
  const auto fine = bdp::refine(coarse, 99);
  EXPECT_EQ(fine.n_steps(), 2 * coarse.n_steps());
  EXPECT_DOUBLE_EQ(fine.delta(), 0.005);
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < coarse.n_steps(); ++i) {
      EXPECT_NEAR(fine.increment(j, 2 * i) + fine.increment(j, 2 * i + 1), coarse.increment(j, i), 1e-15);
    }
  }
}

TEST(Refine, FineIncrementsHaveHalfVariance) {
  const auto coarse = make_grid(1, 0.0, 200.0, 0.02, 4, 0);
  const auto fine = bdp::refine(coarse, 1);
  double ss = 0;
  for (double x : fine.line(0)) ss += x * x;
  const double n = static_cast<double>(fine.n_steps());
  EXPECT_NEAR(ss / n, 0.01, 5 * 0.01 * std::sqrt(2.0 / n));
  std::vector<double> odd;
  std::vector<double> even;
  for (std::size_t i = 0; i < coarse.n_steps(); ++i) {
    even.push_back(fine.increment(0, 2 * i));
    odd.push_back(fine.increment(0, 2 * i + 1));
  }
  EXPECT_LT(std::abs(bdp::correlation(even, odd)), 4.0 / std::sqrt(static_cast<double>(even.size())));
}

TEST(PartialSum, Matrix) {
  const auto g = IncrementGrid::from_matrix({{1, 2, 3}, {-1, 0, 5}}, 0.0, 1.0);
  EXPECT_EQ(bdp::partial_sum(g, 0, 0, 3), 6.0);
  EXPECT_EQ(bdp::partial_sum(g, 1, 1, 3), 5.0);
  EXPECT_EQ(bdp::partial_sum(g, 1, 2, 2), 0.0);
  EXPECT_THROW(bdp::partial_sum(g, 2, 0, 1), bdp::DomainError);
  EXPECT_THROW(IncrementGrid::from_matrix({{1, 2}, {1}}, 0.0, 1.0), bdp::DomainError);
}

TEST(MemoryCap, EnvironmentOverride) {
  ::setenv("BDP_MEM_CAP_BYTES", "1000", 1);
  EXPECT_EQ(bdp::memory_cap_bytes(), 1000u);
  EXPECT_THROW(make_grid(2, 0.0, 1.0, 0.01, 1, 0), bdp::ResourceError);
  ::unsetenv("BDP_MEM_CAP_BYTES");
  EXPECT_EQ(bdp::memory_cap_bytes(), bdp::kDefaultMemoryCapBytes);
  EXPECT_NO_THROW(make_grid(2, 0.0, 1.0, 0.01, 1, 0));
}

TEST(Grid, ShapeArithmetic) {
  const auto g = make_grid(1, 0.0, 1.0, 0.5, 123, 0);
  EXPECT_EQ(g.n_lines(), 1u);
  EXPECT_EQ(g.n_steps(), 2u);
}

TEST(Grid, VarianceOverMillionSteps) {
  const double delta = 1e-3;
  const auto g = make_grid(2, 0.0, 1000.0, delta, 77, 0);
  for (std::size_t j = 0; j < 2; ++j) {
    double ss = 0;
    for (double x : g.line(j)) ss += (x / delta) * x;
    const double n = static_cast<double>(g.n_steps());
    EXPECT_NEAR(ss / n, 1.0, 4 * std::sqrt(2.0 / n));
  }
}

TEST(PartialSum, Additivity) {
  const auto g = make_grid(1, 0.0, 1.0, 0.01, 3, 0);
  EXPECT_EQ(bdp::partial_sum(g, 0, 17, 17), 0.0);
  double total = 0;
  for (double x : g.line(0)) total += x;
  EXPECT_EQ(bdp::partial_sum(g, 0, 0, g.n_steps()), total);
  // Left-to-right summation makes the split exact when resumed from the running total.
  double running = 0;
  for (std::size_t i = 0; i < 40; ++i) running += g.increment(0, i);
  double rest = running;
  for (std::size_t i = 40; i < 90; ++i) rest += g.increment(0, i);
  EXPECT_EQ(rest, bdp::partial_sum(g, 0, 0, 90));
  EXPECT_NEAR(bdp::partial_sum(g, 0, 0, 40) + bdp::partial_sum(g, 0, 40, 90), bdp::partial_sum(g, 0, 0, 90),
              1e-14);
}

}  // namespace
