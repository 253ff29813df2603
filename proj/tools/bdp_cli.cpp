// SPDX-License-Identifier: Apache-2.0
//
// bdp: run one experiment, print a summary table and optionally write a JSON
// report and a CSV table.
//
// Exit codes: 0 all verdicts pass, 1 a verdict failed or a numerical routine
// gave up, 2 usage error, 3 resource cap exceeded.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bdp/bdp.hpp"

#ifndef BDP_BUILD_ID
#define BDP_BUILD_ID "unknown"
#endif

namespace {

using bdp::AnalyticRef;
using bdp::ExperimentReport;
using bdp::ResultEntry;
using bdp::Verdict;
using nlohmann::json;

constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t threads = bdp::default_threads();
  std::string out;
  std::string csv;
};

// One CSV row per (parameter point, estimate).
struct CsvRow {
  std::string point;
  ResultEntry entry;
};

struct Run {
  ExperimentReport report;
  std::vector<CsvRow> csv;

  void add(const std::string& point, ResultEntry e) {
    csv.push_back({point, e});
    report.results.push_back(std::move(e));
  }
  void ref(std::string name, double v) { report.analytic_refs.push_back({std::move(name), v}); }
  void verdict(std::string criterion, bool pass) { report.verdicts.push_back({std::move(criterion), pass}); }
};

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void print_summary(const ExperimentReport& r) {
  const auto cell = [](const std::string& text, int width) {
    std::ostringstream os;
    os << ' ' << std::setw(width) << text;
    return os.str();
  };
  std::cout << "command  " << r.command << "\nseed     " << r.seed << "\n";
  if (!r.results.empty()) {
    std::cout << '\n'
              << std::left << std::setw(36) << "result" << std::right << cell("mean", 17) << cell("stderr", 17)
              << cell("ci_low", 17) << cell("ci_high", 17) << cell("n", 9) << '\n';
    for (const auto& e : r.results) {
      std::cout << std::left << std::setw(36) << e.name << std::right << cell(format_number(e.mean), 17)
                << cell(format_number(e.std_error), 17) << cell(format_number(e.ci_low), 17)
                << cell(format_number(e.ci_high), 17) << cell(std::to_string(e.n_samples), 9) << '\n';
    }
  }
  if (!r.analytic_refs.empty()) {
    std::cout << '\n' << std::left << std::setw(36) << "reference" << std::right << cell("value", 17) << '\n';
    for (const auto& a : r.analytic_refs) {
      std::cout << std::left << std::setw(36) << a.name << std::right << cell(format_number(a.value), 17) << '\n';
    }
  }
  if (!r.verdicts.empty()) {
    std::cout << '\n';
    for (const auto& v : r.verdicts) {
      std::cout << std::left << std::setw(36) << v.criterion << (v.pass ? "PASS" : "FAIL") << '\n';
    }
  }
  std::cout << "\nwall time " << std::fixed << std::setprecision(3) << r.wall_time_seconds << " s\n";
  std::cout.unsetf(std::ios::fixed);
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  std::ofstream f(path);
  if (!f) throw bdp::DomainError("cannot open CSV output " + path);
  f << "point,name,mean,stderr,ci_low,ci_high,n_samples\n";
  for (const auto& row : rows) {
    const auto& e = row.entry;
    f << '"' << row.point << "\"," << e.name << ',' << format_number(e.mean) << ',' << format_number(e.std_error)
      << ',' << format_number(e.ci_low) << ',' << format_number(e.ci_high) << ',' << e.n_samples << '\n';
  }
}

// --- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string fn;
  double s = 1.0;
  double t = 1.0;
  double lambda = 1.0;
  double mu = 2.0;
  double r = 0.0;
};

void run_eval(const EvalArgs& a, Run& run) {
  namespace an = bdp::analytics;
  run.report.config = {{"fn", a.fn}, {"s", a.s}, {"t", a.t}, {"lambda", a.lambda}, {"mu", a.mu}, {"r", a.r}};
  double v = 0.0;
  if (a.fn == "j_gue") {
    v = an::j_gue(a.r);
  } else if (a.fn == "lambda_pp") {
    v = an::lambda_pp_closed(a.s, a.t, a.lambda);
  } else if (a.fn == "lambda_pp_integral") {
    v = an::lambda_pp_integral(a.s, a.t, a.lambda);
  } else if (a.fn == "lambda_pp_var") {
    const auto sol = an::lambda_pp_variational(a.s, a.t, a.lambda);
    v = sol.value;
    run.ref("argmin", sol.argmin);
  } else if (a.fn == "j_pp") {
    v = an::j_pp_closed(a.s, a.t, a.r);
  } else if (a.fn == "j_pp_integral") {
    v = an::j_pp_integral(a.s, a.t, a.r);
  } else if (a.fn == "j_pp_conj") {
    v = an::j_pp_conjugate(a.s, a.t, a.r);
  } else if (a.fn == "lambda_stat") {
    v = an::lambda_stationary(a.s, a.t, a.lambda, a.mu).as_double();
  } else {
    throw CLI::ValidationError("--fn", "unknown function " + a.fn);
  }
  run.ref(a.fn, v);
  std::cout << format_number(v) << '\n';
}

// --- duality --------------------------------------------------------------

struct DualityArgs {
  double s = 1.0;
  double t = 1.0;
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::size_t points = 4001;
  double width = 20.0;
};

void run_duality(const DualityArgs& a, Run& run) {
  namespace an = bdp::analytics;
  run.report.config = {{"s", a.s}, {"t", a.t}, {"lambda", a.lambdas}, {"points", a.points}, {"width", a.width}};
  const auto tab = an::tabulate_j(a.s, a.t, a.points, a.width);
  bool ok = true;
  for (double lambda : a.lambdas) {
    const auto conj = an::legendre_conjugate(tab, lambda);
    const double exact = an::lambda_pp_closed(a.s, a.t, lambda);
    const std::string point = "lambda=" + format_number(lambda);
    run.add(point, ResultEntry::value("conjugate(" + format_number(lambda) + ")", conj.as_double()));
    run.ref("lambda_pp(" + format_number(lambda) + ")", exact);
    ok = ok && conj.is_finite() && std::abs(conj.value() - exact) <= 1e-5;
  }
  run.verdict("criterion_2_duality", ok);
}

// --- lln ------------------------------------------------------------------

struct LlnArgs {
  std::size_t n = 100;
  double t = 1.0;
  double delta = 0.01;
  std::size_t replications = 200;
};

void run_lln(const LlnArgs& a, const Common& c, Run& run) {
  run.report.config = {{"n", a.n}, {"t", a.t}, {"delta", a.delta}, {"replications", a.replications}};
  const auto e = bdp::lpp::lln_estimate(a.n, a.t, a.delta, c.seed, a.replications, c.threads);
  run.add("n=" + std::to_string(a.n), ResultEntry::from("L_n(nt)/n", e));
  run.ref("2sqrt(t)", 2.0 * std::sqrt(a.t));
  run.verdict("criterion_5_lln", e.mean >= 0.9 * 2.0 * std::sqrt(a.t) && e.mean <= 2.0 * std::sqrt(a.t));
}

// --- burke ----------------------------------------------------------------

struct BurkeArgs {
  double mu = 1.0;
  std::size_t stations = 200;
  double horizon = 30.0;
  double delta = 1e-3;
  std::size_t seeds = 50;
  std::string init = "exp";
};

void run_burke(const BurkeArgs& a, const Common& c, Run& run) {
  using bdp::stationary::InitMode;
  run.report.config = {{"mu", a.mu},         {"stations", a.stations}, {"horizon", a.horizon},
                       {"delta", a.delta},   {"seeds", a.seeds},       {"init", a.init}};
  const InitMode mode = a.init == "zero" ? InitMode::zero : InitMode::exponential;
  const auto rep =
      bdp::stationary::burke_test(a.mu, a.stations, a.horizon, a.delta, c.seed, a.seeds, mode, c.threads);
  run.add("pooled", ResultEntry::value("pooled_mean", rep.pooled_mean));
  run.add("pooled", ResultEntry::value("ks_statistic", rep.pooled_ks.statistic));
  run.add("pooled", ResultEntry::value("ks_p_value", rep.pooled_ks.p_value));
  run.add("pooled", ResultEntry::value("zero_fraction", rep.zero_fraction));
  run.add("stations", ResultEntry::value("max_abs_mean_z", rep.max_abs_mean_z));
  run.add("stations", ResultEntry::value("max_abs_lag1_correlation", rep.max_abs_correlation));
  for (std::size_t k = 0; k < rep.station_means.size(); ++k) {
    run.csv.push_back({"station=" + std::to_string(k + 1),
                       {"mean", rep.station_means[k], rep.mean_standard_error, 0, 0, rep.n_seeds}});
  }
  run.ref("exponential_mean", 1.0 / a.mu);
  run.verdict("criterion_7_burke_ks", rep.ks_pass);
  run.verdict("criterion_7_burke_means", rep.means_pass);
  run.verdict("criterion_7_burke_correlation", rep.correlation_pass);
}

// --- gue-compare ----------------------------------------------------------

struct GueArgs {
  std::size_t n = 5;
  std::size_t samples = 10000;
  double delta = 1e-3;
  std::size_t levels = 1;
};

void run_gue(const GueArgs& a, const Common& c, Run& run) {
  run.report.config = {{"n", a.n}, {"samples", a.samples}, {"delta", a.delta}, {"levels", a.levels}};
  const auto cmp = bdp::rmt::gue_vs_lpp(a.n, a.samples, a.delta, c.seed, a.levels, c.threads);
  run.ref("gue_mean", cmp.gue_mean);
  for (std::size_t l = 0; l < cmp.deltas.size(); ++l) {
    const std::string point = "delta=" + format_number(cmp.deltas[l]);
    run.add(point, ResultEntry::value("lpp_mean@" + format_number(cmp.deltas[l]), cmp.lpp_means[l]));
    run.add(point, ResultEntry::value("ks_statistic@" + format_number(cmp.deltas[l]), cmp.ks[l].statistic));
    run.add(point, ResultEntry::value("ks_p_value@" + format_number(cmp.deltas[l]), cmp.ks[l].p_value));
  }
  run.verdict("criterion_6_ks_p_value", cmp.ks.front().p_value > 0.01);
  if (cmp.ks.size() > 1) run.verdict("criterion_6_ks_decreasing", cmp.ks[1].statistic < cmp.ks[0].statistic);
}

// --- tail -----------------------------------------------------------------

struct SamplerArgs {
  std::string sampler = "gue";
  double delta = 1e-3;
  bdp::estimator::Sampler get() const {
    return sampler == "lpp" ? bdp::estimator::Sampler::lpp(delta) : bdp::estimator::Sampler::gue();
  }
};

struct TailArgs {
  std::vector<std::size_t> n{10};
  std::vector<double> r{0.1};
  std::size_t samples = 1000000;
  SamplerArgs sampler;
};

void run_tail(const TailArgs& a, const Common& c, Run& run) {
  run.report.config = {{"n", a.n},
                       {"r", a.r},
                       {"samples", a.samples},
                       {"sampler", a.sampler.sampler},
                       {"delta", a.sampler.delta}};
  bool ok = true;
  for (double r : a.r) {
    const auto table = bdp::estimator::bound_check(a.n, r, a.sampler.get(), a.samples, c.seed, c.threads);
    run.ref("j_gue(" + format_number(r) + ")", table.j_gue);
    for (const auto& row : table.rows) {
      const std::string point = "n=" + std::to_string(row.n) + ",r=" + format_number(r);
      run.add(point, ResultEntry::from("p(n=" + std::to_string(row.n) + ",r=" + format_number(r) + ")",
                                       row.probability));
      run.ref("bound(n=" + std::to_string(row.n) + ",r=" + format_number(r) + ")", row.bound);
      ok = ok && row.pass;
    }
  }
  run.verdict("criterion_4_tail_bound", ok);
}

// --- lyapunov -------------------------------------------------------------

struct LyapunovArgs {
  std::vector<std::size_t> n{4, 8, 16};
  double lambda = 0.5;
  std::size_t samples = 100000;
  SamplerArgs sampler;
};

void run_lyapunov(const LyapunovArgs& a, const Common& c, Run& run) {
  run.report.config = {{"n", a.n},
                       {"lambda", a.lambda},
                       {"samples", a.samples},
                       {"sampler", a.sampler.sampler},
                       {"delta", a.sampler.delta}};
  const auto rows = bdp::estimator::lyapunov_check(a.n, a.lambda, a.sampler.get(), a.samples, c.seed, c.threads);
  bool below = true;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& row = rows[i];
    run.add("n=" + std::to_string(row.n), ResultEntry::from("log_mgf/n(n=" + std::to_string(row.n) + ")", row.scaled));
    for (const auto& w : row.scaled.warnings) std::cerr << "warning (n=" << row.n << "): " << w << '\n';
    below = below && row.below_limit;
    if (i > 0) monotone = monotone && row.scaled.mean >= rows[i - 1].scaled.mean;
  }
  if (!rows.empty()) run.ref("lambda_11(" + format_number(a.lambda) + ")", rows.front().limit);
  run.verdict("criterion_10_below_limit", below);
  run.verdict("criterion_10_nondecreasing", monotone);
}

// --- stationary-check -----------------------------------------------------

struct StationaryCheckArgs {
  std::size_t grids = 1000;
  std::size_t max_stations = 6;
  std::size_t max_steps = 50;
  std::size_t superadditivity = 1000;
};

void run_stationary_check(const StationaryCheckArgs& a, const Common& c, Run& run) {
  run.report.config = {{"grids", a.grids},
                       {"max_stations", a.max_stations},
                       {"max_steps", a.max_steps},
                       {"superadditivity", a.superadditivity}};
  const auto sweep = bdp::stationary::pathwise_sweep(c.seed, a.grids, a.max_stations, a.max_steps, c.threads);
  run.add("pathwise", ResultEntry::value("max_decomposition_residual", sweep.max_decomposition));
  run.add("pathwise", ResultEntry::value("max_coupling_residual", sweep.max_coupling));
  run.verdict("criterion_8_pathwise", sweep.max_decomposition <= 1e-9 && sweep.max_coupling <= 1e-9);
  if (a.superadditivity > 0) {
    const auto sup = bdp::lpp::superadditivity_sweep(c.seed, a.superadditivity, 0.01, 200, c.threads);
    run.add("superadditivity", ResultEntry::value("pass_fraction", static_cast<double>(sup.passed) /
                                                                          static_cast<double>(sup.realisations)));
    run.add("superadditivity", ResultEntry::value("min_gap", sup.min_gap));
    run.verdict("criterion_9_superadditivity", sup.passed == sup.realisations);
  }
}

std::uint64_t draw_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian directed percolation experiments"};
  app.require_subcommand(1);
  app.allow_extras(false);

  Common common;
  std::string seed_text;
  const auto add_common = [&](CLI::App* sub, bool stochastic) {
    if (stochastic) {
      sub->add_option("--seed", seed_text, "64-bit seed; drawn and recorded when omitted");
      sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    }
    sub->add_option("--out", common.out, "JSON report path");
    sub->add_option("--csv", common.csv, "CSV table path");
  };

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate an analytic function");
  eval_cmd->add_option("--fn", eval.fn, "function")
      ->required()
      ->check(CLI::IsMember({"j_gue", "lambda_pp", "lambda_pp_integral", "lambda_pp_var", "j_pp", "j_pp_integral",
                             "j_pp_conj", "lambda_stat"}));
  eval_cmd->add_option("--s", eval.s);
  eval_cmd->add_option("--t", eval.t);
  eval_cmd->add_option("--lambda", eval.lambda);
  eval_cmd->add_option("--mu", eval.mu);
  eval_cmd->add_option("--r", eval.r);
  add_common(eval_cmd, false);

  DualityArgs duality;
  auto* duality_cmd = app.add_subcommand("duality", "numeric conjugate of the tabulated rate function");
  duality_cmd->add_option("--s", duality.s);
  duality_cmd->add_option("--t", duality.t);
  duality_cmd->add_option("--lambda", duality.lambdas)->delimiter(',');
  duality_cmd->add_option("--points", duality.points);
  duality_cmd->add_option("--width", duality.width);
  add_common(duality_cmd, false);

  LlnArgs lln;
  auto* lln_cmd = app.add_subcommand("lln", "law of large numbers for L_n(nt)/n");
  lln_cmd->add_option("--n", lln.n);
  lln_cmd->add_option("--t", lln.t);
  lln_cmd->add_option("--delta", lln.delta);
  lln_cmd->add_option("--replications", lln.replications);
  add_common(lln_cmd, true);

  BurkeArgs burke;
  auto* burke_cmd = app.add_subcommand("burke", "queue lengths of the stationary tandem");
  burke_cmd->add_option("--mu", burke.mu);
  burke_cmd->add_option("--stations", burke.stations);
  burke_cmd->add_option("--horizon", burke.horizon);
  burke_cmd->add_option("--delta", burke.delta);
  burke_cmd->add_option("--seeds", burke.seeds);
  burke_cmd->add_option("--init", burke.init)->check(CLI::IsMember({"exp", "zero"}));
  add_common(burke_cmd, true);

  GueArgs gue;
  auto* gue_cmd = app.add_subcommand("gue-compare", "L_n(1) against the largest GUE eigenvalue");
  gue_cmd->add_option("--n", gue.n);
  gue_cmd->add_option("--samples", gue.samples);
  gue_cmd->add_option("--delta", gue.delta);
  gue_cmd->add_option("--levels", gue.levels);
  add_common(gue_cmd, true);

  const auto add_sampler = [](CLI::App* sub, SamplerArgs& s) {
    sub->add_option("--sampler", s.sampler)->check(CLI::IsMember({"gue", "lpp"}));
    sub->add_option("--delta", s.delta, "grid step for the lpp sampler");
  };

  TailArgs tail;
  auto* tail_cmd = app.add_subcommand("tail", "upper-tail probability against the finite-n bound");
  tail_cmd->add_option("--n", tail.n)->delimiter(',');
  tail_cmd->add_option("--r", tail.r)->delimiter(',');
  tail_cmd->add_option("--samples", tail.samples);
  add_sampler(tail_cmd, tail.sampler);
  add_common(tail_cmd, true);

  LyapunovArgs lyap;
  auto* lyap_cmd = app.add_subcommand("lyapunov", "scaled log-MGF against the Lyapunov exponent");
  lyap_cmd->add_option("--n", lyap.n)->delimiter(',');
  lyap_cmd->add_option("--lambda", lyap.lambda);
  lyap_cmd->add_option("--samples", lyap.samples);
  add_sampler(lyap_cmd, lyap.sampler);
  add_common(lyap_cmd, true);

  StationaryCheckArgs sc;
  auto* sc_cmd = app.add_subcommand("stationary-check", "pathwise identities on random small grids");
  sc_cmd->add_option("--grids", sc.grids);
  sc_cmd->add_option("--max-stations", sc.max_stations);
  sc_cmd->add_option("--max-steps", sc.max_steps);
  sc_cmd->add_option("--superadditivity", sc.superadditivity, "realisations for the superadditivity sweep");
  add_common(sc_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (!seed_text.empty()) {
    try {
      std::size_t used = 0;
      common.seed = std::stoull(seed_text, &used, 0);
      if (used != seed_text.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      std::cerr << "--seed: not an unsigned 64-bit integer: " << seed_text << '\n';
      return kExitUsage;
    }
    common.seed_given = true;
  } else {
    common.seed = draw_seed();
  }

  Run run;
  auto* sub = app.get_subcommands().front();
  run.report.command = sub->get_name();
  run.report.build_id = BDP_BUILD_ID;
  run.report.seed = common.seed;
  const auto started = std::chrono::steady_clock::now();
  try {
    const std::string& name = run.report.command;
    if (name == "eval") {
      run_eval(eval, run);
    } else if (name == "duality") {
      run_duality(duality, run);
    } else if (name == "lln") {
      run_lln(lln, common, run);
    } else if (name == "burke") {
      run_burke(burke, common, run);
    } else if (name == "gue-compare") {
      run_gue(gue, common, run);
    } else if (name == "tail") {
      run_tail(tail, common, run);
    } else if (name == "lyapunov") {
      run_lyapunov(lyap, common, run);
    } else {
      run_stationary_check(sc, common, run);
    }
  } catch (const bdp::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << '\n';
    return kExitResource;
  } catch (const bdp::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const bdp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerdict;
  }
  run.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  run.report.config["seed"] = common.seed;
  run.report.config["seed_drawn"] = !common.seed_given;
  run.report.config["threads"] = common.threads;

  if (run.report.command != "eval") print_summary(run.report);
  if (!common.out.empty()) {
    std::ofstream f(common.out);
    if (!f) {
      std::cerr << "cannot open report output " << common.out << '\n';
      return kExitUsage;
    }
    f << json(run.report).dump(2) << '\n';
  }
  if (!common.csv.empty()) write_csv(common.csv, run.csv);
  return run.report.all_pass() ? 0 : kExitVerdict;
}
