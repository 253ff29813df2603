// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "bdp/report.hpp"

namespace {

using namespace bdp;

ExperimentReport sample_report() {
  ExperimentReport r;
  r.command = "tail";
  r.config = {{"n", {5, 10}}, {"r", 0.1}, {"sampler", "gue"}};
  r.build_id = "0.1.0+abc";
  Estimate e{0.01, 0.001, 1000000, 0.009, 0.011, EstimateMethod::binomial_exact, {}};
  r.results.push_back(ResultEntry::from("p", e));
  r.results.push_back(ResultEntry::value("lambda", std::numeric_limits<double>::infinity()));
  r.analytic_refs.push_back({"j_gue(0.1)", 0.12103014412005443});
  r.verdicts.push_back({"criterion_4_tail_bound", true});
  r.seed = 0xfedcba9876543210ull;
  r.wall_time_seconds = 1.25;
  return r;
}

TEST(Report, RoundTrip) {
  const auto r = sample_report();
  const nlohmann::json j = r;
  const auto back = nlohmann::json::parse(j.dump()).get<ExperimentReport>();
  EXPECT_EQ(back, r);
}

TEST(Report, Schema) {
  const nlohmann::json j = sample_report();
  for (const char* key : {"command", "config", "results", "analytic_refs", "verdicts", "seed", "wall_time_seconds"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const auto& first = j["results"][0];
  EXPECT_EQ(first["stderr"], 0.001);
  EXPECT_EQ(first["ci"].size(), 2u);
  EXPECT_EQ(first["n_samples"], 1000000);
  EXPECT_EQ(j["results"][1]["mean"], "inf");
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 0xfedcba9876543210ull);
}

TEST(Report, AllPass) {
  auto r = sample_report();
  EXPECT_TRUE(r.all_pass());
  r.verdicts.push_back({"criterion_5_lln", false});
  EXPECT_FALSE(r.all_pass());
}

}  // namespace
