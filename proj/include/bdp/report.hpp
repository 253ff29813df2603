// SPDX-License-Identifier: Apache-2.0
//
// Serializable record of one experiment run.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "bdp/stats.hpp"

namespace bdp {

struct ResultEntry {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_samples = 0;

  static ResultEntry from(std::string name, const Estimate& e) {
    return {std::move(name), e.mean, e.std_error, e.ci_low, e.ci_high, e.n_samples};
  }
  static ResultEntry value(std::string name, double v) { return {std::move(name), v, 0.0, v, v, 0}; }

  friend bool operator==(const ResultEntry&, const ResultEntry&) = default;
};

struct AnalyticRef {
  std::string name;
  double value = 0.0;
  friend bool operator==(const AnalyticRef&, const AnalyticRef&) = default;
};

struct Verdict {
  std::string criterion;
  bool pass = false;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct ExperimentReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::string build_id;
  std::vector<ResultEntry> results;
  std::vector<AnalyticRef> analytic_refs;
  std::vector<Verdict> verdicts;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;

  bool all_pass() const {
    for (const auto& v : verdicts) {
      if (!v.pass) return false;
    }
    return true;
  }

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

namespace detail {

// JSON has no infinity; non-finite numbers travel as the strings "inf", "-inf", "nan".
inline nlohmann::json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const ResultEntry& r) {
  j = {{"name", r.name},
       {"mean", detail::number_to_json(r.mean)},
       {"stderr", detail::number_to_json(r.std_error)},
       {"ci", {detail::number_to_json(r.ci_low), detail::number_to_json(r.ci_high)}},
       {"n_samples", r.n_samples}};
}

inline void from_json(const nlohmann::json& j, ResultEntry& r) {
  r.name = j.at("name").get<std::string>();
  r.mean = detail::number_from_json(j.at("mean"));
  r.std_error = detail::number_from_json(j.at("stderr"));
  r.ci_low = detail::number_from_json(j.at("ci").at(0));
  r.ci_high = detail::number_from_json(j.at("ci").at(1));
  r.n_samples = j.at("n_samples").get<std::size_t>();
}

inline void to_json(nlohmann::json& j, const AnalyticRef& a) {
  j = {{"name", a.name}, {"value", detail::number_to_json(a.value)}};
}

inline void from_json(const nlohmann::json& j, AnalyticRef& a) {
  a.name = j.at("name").get<std::string>();
  a.value = detail::number_from_json(j.at("value"));
}

inline void to_json(nlohmann::json& j, const Verdict& v) { j = {{"criterion", v.criterion}, {"pass", v.pass}}; }

inline void from_json(const nlohmann::json& j, Verdict& v) {
  v.criterion = j.at("criterion").get<std::string>();
  v.pass = j.at("pass").get<bool>();
}

inline void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = {{"command", r.command},
       {"config", r.config},
       {"build_id", r.build_id},
       {"results", r.results},
       {"analytic_refs", r.analytic_refs},
       {"verdicts", r.verdicts},
       {"seed", r.seed},
       {"wall_time_seconds", r.wall_time_seconds}};
}

inline void from_json(const nlohmann::json& j, ExperimentReport& r) {
  r.command = j.at("command").get<std::string>();
  r.config = j.at("config");
  r.build_id = j.value("build_id", std::string{});
  r.results = j.at("results").get<std::vector<ResultEntry>>();
  r.analytic_refs = j.at("analytic_refs").get<std::vector<AnalyticRef>>();
  r.verdicts = j.at("verdicts").get<std::vector<Verdict>>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.wall_time_seconds = j.at("wall_time_seconds").get<double>();
}

}  // namespace bdp
