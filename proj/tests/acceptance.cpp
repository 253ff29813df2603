// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. `acceptance` runs every criterion, `acceptance
// --criterion N` runs one. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Every tolerance, sample size and seed is fixed below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bdp/bdp.hpp"
#include "brute_force.hpp"

namespace {

namespace an = bdp::analytics;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Appends "label=value" to the detail line.
class Detail {
 public:
  template <class T>
  Detail& operator()(const std::string& label, const T& value) {
    if (!os_.str().empty()) os_ << ' ';
    os_ << label << '=' << value;
    return *this;
  }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const std::size_t kThreads = bdp::default_threads();

// 1. Closed, integral, variational and conjugate forms agree over the sweep.
Outcome criterion_1() {
  constexpr double kLambdaIntegralTol = 1e-9;
  constexpr double kLambdaVariationalTol = 1e-8;
  constexpr double kJIntegralTol = 1e-9;
  constexpr double kJConjugateTol = 1e-6;
  constexpr double kBudgetSeconds = 10.0;
  const auto start = std::chrono::steady_clock::now();
  double e_li = 0, e_lv = 0, e_ji = 0, e_jc = 0;
  for (double s : {0.5, 1.0, 2.0}) {
    for (double t : {0.5, 1.0, 2.0}) {
      for (double lambda : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        const double closed = an::lambda_pp_closed(s, t, lambda);
        e_li = std::max(e_li, std::abs(closed - an::lambda_pp_integral(s, t, lambda)));
        e_lv = std::max(e_lv, std::abs(closed - an::lambda_pp_variational(s, t, lambda).value));
      }
      const double edge = 2.0 * std::sqrt(s * t);
      for (int k = 0; k <= 10; ++k) {
        const double r = edge + 0.5 * k;
        const double closed = an::j_pp_closed(s, t, r);
        e_ji = std::max(e_ji, std::abs(closed - an::j_pp_integral(s, t, r)));
        e_jc = std::max(e_jc, std::abs(closed - an::j_pp_conjugate(s, t, r)));
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = e_li <= kLambdaIntegralTol && e_lv <= kLambdaVariationalTol && e_ji <= kJIntegralTol &&
           e_jc <= kJConjugateTol && elapsed < kBudgetSeconds;
  o.detail = Detail()("lambda_integral_err", e_li)("lambda_variational_err", e_lv)("j_integral_err", e_ji)(
                 "j_conjugate_err", e_jc)("seconds", elapsed)
                 .str();
  return o;
}

// 2. Numeric conjugate of the tabulated rate function recovers Lambda_{1,1}.
Outcome criterion_2() {
  constexpr double kTol = 1e-5;
  constexpr double kBudgetSeconds = 10.0;
  const auto start = std::chrono::steady_clock::now();
  const auto tab = an::tabulate_j(1.0, 1.0);
  double err = 0;
  bool finite = true;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto v = an::legendre_conjugate(tab, lambda);
    finite = finite && v.is_finite();
    if (v.is_finite()) err = std::max(err, std::abs(v.value() - an::lambda_pp_closed(1.0, 1.0, lambda)));
  }
  const double elapsed = seconds_since(start);
  return {finite && err <= kTol && elapsed < kBudgetSeconds,
          Detail()("max_err", err)("seconds", elapsed).str()};
}

// 3. j_gue(r) = J_{1,1}(2 + 2r).
Outcome criterion_3() {
  constexpr double kTol = 1e-10;
  constexpr double kBudgetSeconds = 1.0;
  const auto start = std::chrono::steady_clock::now();
  double err = 0;
  for (double r : {0.0, 0.05, 0.1, 0.5, 1.0}) {
    err = std::max(err, std::abs(an::j_gue(r) - an::j_pp_closed(1.0, 1.0, 2.0 + 2.0 * r)));
  }
  const double elapsed = seconds_since(start);
  return {err <= kTol && elapsed < kBudgetSeconds, Detail()("max_err", err)("seconds", elapsed).str()};
}

// 4. P(L_n(n) >= 2n(1+r)) <= exp(-n j_gue(r)), Clopper-Pearson upper end.
Outcome criterion_4() {
  constexpr std::size_t kSamples = 1000000;
  constexpr std::uint64_t kSeed = 20240404;
  constexpr double kBudgetSeconds = 300.0;
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  Detail d;
  for (double r : {0.05, 0.1, 0.2}) {
    const auto table =
        bdp::estimator::bound_check({5, 10, 20}, r, bdp::estimator::Sampler::gue(), kSamples, kSeed, kThreads);
    for (const auto& row : table.rows) {
      o.pass = o.pass && row.pass;
      d("n" + std::to_string(row.n) + "_r" + std::to_string(r).substr(0, 4),
        std::to_string(row.probability.ci_high) + "<=" + std::to_string(row.bound));
    }
  }
  const double elapsed = seconds_since(start);
  o.pass = o.pass && elapsed < kBudgetSeconds;
  d("seconds", elapsed);
  o.detail = d.str();
  return o;
}

// 5. Mean of L_n(n)/n at n = 100, delta = 0.01 lies in [1.80, 2.00].
Outcome criterion_5() {
  constexpr double kLow = 1.80;
  constexpr double kHigh = 2.00;
  constexpr std::uint64_t kSeed = 20240405;
  constexpr double kBudgetSeconds = 600.0;
  const auto start = std::chrono::steady_clock::now();
  const auto e = bdp::lpp::lln_estimate(100, 1.0, 0.01, kSeed, 200, kThreads);
  const double elapsed = seconds_since(start);
  return {e.mean >= kLow && e.mean <= kHigh && elapsed < kBudgetSeconds,
          Detail()("mean", e.mean)("stderr", e.std_error)("seconds", elapsed).str()};
}

// 6. L_5(1) on a 1e-3 grid against the largest GUE eigenvalue at n = 5.
Outcome criterion_6() {
  constexpr double kAlpha = 0.01;
  constexpr std::size_t kSamples = 10000;
  constexpr std::uint64_t kSeed = 20240406;
  constexpr double kBudgetSeconds = 600.0;
  const auto start = std::chrono::steady_clock::now();
  const auto cmp = bdp::rmt::gue_vs_lpp(5, kSamples, 1e-3, kSeed, 1, kThreads);
  const double elapsed = seconds_since(start);
  const bool p_ok = cmp.ks[0].p_value > kAlpha;
  const bool decreasing = cmp.ks[1].statistic < cmp.ks[0].statistic;
  return {p_ok && decreasing && elapsed < kBudgetSeconds,
          Detail()("ks_p", cmp.ks[0].p_value)("ks_D", cmp.ks[0].statistic)("ks_D_half_delta", cmp.ks[1].statistic)(
              "lpp_mean", cmp.lpp_means[0])("lpp_mean_half_delta", cmp.lpp_means[1])("gue_mean", cmp.gue_mean)(
              "p_ok", p_ok)("decreasing", decreasing)("seconds", elapsed)
              .str()};
}

// 7. Queue lengths at time 0 of 200 stationary stations.
Outcome criterion_7() {
  constexpr std::uint64_t kSeed = 20240407;
  constexpr double kBudgetSeconds = 600.0;
  const auto start = std::chrono::steady_clock::now();
  const auto rep = bdp::stationary::burke_test(1.0, 200, 30.0, 1e-3, kSeed, 50,
                                               bdp::stationary::InitMode::exponential, kThreads, 0.01);
  const double elapsed = seconds_since(start);
  return {rep.pass() && elapsed < kBudgetSeconds,
          Detail()("ks_p", rep.pooled_ks.p_value)("ks_D", rep.pooled_ks.statistic)("zero_fraction", rep.zero_fraction)(
              "pooled_mean", rep.pooled_mean)("max_mean_z", rep.max_abs_mean_z)("max_abs_corr", rep.max_abs_correlation)(
              "corr_4se", 4 * rep.correlation_standard_error)("ks_pass", rep.ks_pass)("means_pass", rep.means_pass)(
              "corr_pass", rep.correlation_pass)("seconds", elapsed)
              .str()};
}

// 8. Decomposition and coupling identities, plus enumeration on tiny grids.
Outcome criterion_8() {
  constexpr double kIdentityTol = 1e-9;
  constexpr double kEnumerationTol = 1e-12;
  constexpr std::uint64_t kSeed = 20240408;
  constexpr double kBudgetSeconds = 60.0;
  const auto start = std::chrono::steady_clock::now();
  const auto sweep = bdp::stationary::pathwise_sweep(kSeed, 1000, 6, 50, kThreads);

  double enum_err = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto c = bdp::stationary::random_check_case(kSeed + 1, r, 4, 12);
    const auto& g = c.grid;
    const std::size_t zero = *g.index_of(0.0);
    const std::size_t end = g.n_steps();
    enum_err = std::max(enum_err, std::abs(bdp::stationary::stationary_passage(g, c.mu, c.n) -
                                           brute::stationary_passage(g, c.mu, c.n, zero, end)));
    const auto at_zero = bdp::stationary::stationary_passages_at(g, c.mu, c.n, zero);
    for (std::size_t j = 1; j <= c.n; ++j) {
      enum_err = std::max(enum_err, std::abs(at_zero[j - 1] - brute::stationary_passage(g, c.mu, j, zero, zero)));
      enum_err = std::max(enum_err, std::abs(bdp::lpp::last_passage(g, j, zero, c.n, end) -
                                             brute::last_passage(g, j, zero, c.n, end)));
    }
    const auto q = bdp::stationary::queue_lengths_at(g, c.mu, bdp::stationary::InitMode::zero, {end});
    double total = 0;
    for (const auto& row : q) total += row[0];
    enum_err = std::max(enum_err, std::abs(total - brute::total_queue(g, c.mu)));
  }
  const double elapsed = seconds_since(start);
  return {sweep.max_decomposition <= kIdentityTol && sweep.max_coupling <= kIdentityTol &&
              enum_err <= kEnumerationTol && elapsed < kBudgetSeconds,
          Detail()("max_decomposition", sweep.max_decomposition)("max_coupling", sweep.max_coupling)(
              "max_enumeration_err", enum_err)("seconds", elapsed)
              .str()};
}

// 9. Superadditivity holds on every realisation.
Outcome criterion_9() {
  constexpr std::uint64_t kSeed = 20240409;
  constexpr double kBudgetSeconds = 60.0;
  const auto start = std::chrono::steady_clock::now();
  const auto sweep = bdp::lpp::superadditivity_sweep(kSeed, 1000, 0.01, 200, kThreads);
  const double elapsed = seconds_since(start);
  return {sweep.passed == sweep.realisations && elapsed < kBudgetSeconds,
          Detail()("passed", sweep.passed)("of", sweep.realisations)("min_gap", sweep.min_gap)("seconds", elapsed)
              .str()};
}

// 10. (1/n) log E exp(0.5 L_n(n)) <= Lambda_{1,1}(0.5) + 2 stderr, nondecreasing
// in n; and the stationary scaling identity.
Outcome criterion_10() {
  constexpr double kLambda = 0.5;
  constexpr std::size_t kSamples = 100000;
  constexpr std::uint64_t kSeed = 20240410;
  constexpr double kScalingTol = 1e-12;
  constexpr double kBudgetSeconds = 900.0;
  const auto start = std::chrono::steady_clock::now();
  const auto rows = bdp::estimator::lyapunov_check({4, 8, 16}, kLambda, bdp::estimator::Sampler::gue(), kSamples,
                                                   kSeed, kThreads);
  bool below = true;
  bool monotone = true;
  Detail d;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    below = below && rows[i].below_limit;
    if (i > 0) monotone = monotone && rows[i].scaled.mean >= rows[i - 1].scaled.mean;
    d("n" + std::to_string(rows[i].n), std::to_string(rows[i].scaled.mean) + "+-" +
                                           std::to_string(rows[i].scaled.std_error));
  }
  d("limit", rows.front().limit);

  double scaling_err = 0;
  bool scaling_infinite_match = true;
  for (double s : {0.5, 1.0, 2.0}) {
    for (double t : {0.5, 1.0, 2.0}) {
      for (double lambda : {0.25, 0.5, 1.0, 2.0}) {
        for (double mu : {0.5, 1.0, 1.5, 3.0}) {
          const auto a = an::lambda_stationary(s, t, lambda, mu);
          const auto b = an::lambda_stationary(s, lambda * lambda * t, 1.0, mu / lambda);
          scaling_infinite_match = scaling_infinite_match && a.is_infinite() == b.is_infinite();
          if (a.is_finite() && b.is_finite()) {
            scaling_err = std::max(scaling_err, std::abs(a.value() - b.value()) / std::max(1.0, std::abs(a.value())));
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  d("below", below)("nondecreasing", monotone)("scaling_err", scaling_err)("seconds", elapsed);
  return {below && monotone && scaling_infinite_match && scaling_err <= kScalingTol && elapsed < kBudgetSeconds,
          d.str()};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> list{
      {"analytic equivalence", criterion_1}, {"duality", criterion_2},
      {"change of variables", criterion_3},  {"finite-n tail bound", criterion_4},
      {"law of large numbers", criterion_5}, {"GUE identity", criterion_6},
      {"Burke property", criterion_7},       {"pathwise identities", criterion_8},
      {"superadditivity", criterion_9},      {"Lyapunov checks", criterion_10}};
  return list;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      const long k = std::strtol(argv[++i], nullptr, 10);
      if (k < 1 || k > static_cast<long>(criteria().size())) {
        std::cerr << "unknown criterion " << argv[i] << '\n';
        return 2;
      }
      selected.push_back(static_cast<std::size_t>(k));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty()) {
    for (std::size_t k = 1; k <= criteria().size(); ++k) selected.push_back(k);
  }

  bool all = true;
  for (std::size_t k : selected) {
    const auto& [name, run] = criteria()[k - 1];
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << k << " (" << name << "): " << o.detail << std::endl;
  }
  return all ? 0 : 1;
}
