// Command-line harness: experiment presets with CSV output, and the
// numerical verification suite.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "batchens/config.hpp"
#include "batchens/estimator.hpp"
#include "batchens/simulator.hpp"
#include "batchens/verify.hpp"

namespace {

using namespace batchens;

struct RunFlags {
  std::string config_path;
  std::string preset;
  std::string policies;
  std::int64_t horizon = 0;
  int sims = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;
  std::string out;
  int parallel = 0;
  bool efficient = false;
  bool full = false;
  double warmup_sigma = 0.0;
  double bernoullify_scale = 0.0;
  std::string arms;
  std::string chart_path;
};

struct RunOptions {
  CLI::Option* preset = nullptr;
  CLI::Option* policies = nullptr;
  CLI::Option* horizon = nullptr;
  CLI::Option* sims = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* delta = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* parallel = nullptr;
  CLI::Option* warmup_sigma = nullptr;
  CLI::Option* bernoullify = nullptr;
  CLI::Option* arms = nullptr;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  out.push_back(current);
  return out;
}

// Flags override file values; anything not given keeps the defaults.
ExperimentConfig merge_flags(const RunFlags& flags, const RunOptions& opts) {
  ExperimentConfig config;
  if (!flags.config_path.empty()) config = load_config_file(flags.config_path);
  if (*opts.preset) config.preset = flags.preset;
  if (*opts.policies) config.policy_names = split_list(flags.policies);
  if (*opts.horizon) config.horizon = flags.horizon;
  if (*opts.sims) config.simulations = flags.sims;
  if (*opts.seed) config.base_seed = flags.seed;
  if (*opts.delta) config.delta = flags.delta;
  if (*opts.out) config.out_path = flags.out;
  if (*opts.parallel) config.parallel = flags.parallel;
  if (flags.efficient) config.efficient_estimator = true;
  if (flags.full) config.efficient_estimator = false;
  if (*opts.warmup_sigma) config.warmup_sigma = flags.warmup_sigma;
  if (*opts.bernoullify) config.bernoullify_scale = flags.bernoullify_scale;
  if (*opts.arms) config.custom_arms = split_list(flags.arms);
  validate_config(config);
  return config;
}

int run_experiment_command(const ExperimentConfig& config, const std::string& chart_path) {
  const std::vector<PolicyConfig> policies = config.resolve_policies();
  const BanditSpec bandit = config.resolve_bandit();

  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult result =
      run_experiment(policies, bandit, config.horizon, config.simulations,
                     config.base_seed, config.parallel);
  const auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

  write_experiment_csv_file(config.out_path, result);
  write_metadata_file(config.out_path + ".meta", config);
  if (!chart_path.empty()) write_chart_svg(chart_path, result);

  std::cout << "wrote " << config.out_path << " (" << result.series.size()
            << " policies, T=" << config.horizon << ", sims=" << config.simulations
            << ", " << elapsed.count() << "s)\n";
  for (const auto& series : result.series)
    std::cout << "  " << series.policy << ": final mean regret "
              << series.mean_regret.back() << " (std " << series.std_regret.back()
              << ")\n";
  return 0;
}

struct VerifyFlags {
  bool quick = false;
  std::int64_t trials = 100000;
  std::uint64_t seed = 1;
  std::string out;
  double bound_scale = 1.0;  // >1 tightens every pass threshold (failure-injection hook)
};

int run_verify_command(const VerifyFlags& flags) {
  std::vector<VerificationReport> reports;
  const std::int64_t trials = flags.quick ? 10000 : flags.trials;
  const int anticonc_max_n = flags.quick ? 30 : 100;
  const double scale = flags.bound_scale;

  // Binomial anti-concentration: exact sweep.
  for (int n = 1; n <= anticonc_max_n; ++n) {
    for (int i = 1; i <= 99; ++i) {
      const double mu = static_cast<double>(i) / 100.0;
      if (!(mu <= 1.0 - 1.0 / static_cast<double>(n))) continue;
      VerificationReport r;
      r.claim = "binomial-anticoncentration";
      r.params = "n=" + std::to_string(n) + ";mu=" + std::to_string(i) + "/100";
      r.value = binomial_anticoncentration(n, mu);
      r.bound = 0.25 * scale;
      r.pass = r.value >= r.bound;
      reports.push_back(std::move(r));
    }
  }

  // Estimator optimism: exact enumeration at small scale.
  const int optimism_max_n = flags.quick ? 8 : 12;
  for (int n = 1; n <= optimism_max_n; ++n) {
    for (int l : {1, 2, 3}) {
      for (int i = 1; i <= 19; ++i) {
        const double mu = static_cast<double>(i) / 20.0;
        VerificationReport r;
        r.claim = "optimism-exact";
        r.params = "n=" + std::to_string(n) + ";l=" + std::to_string(l) +
                   ";mu=" + std::to_string(i) + "/20";
        r.value = optimism_probability_exact(mu, n, l);
        r.bound = (1.0 - std::pow(0.75, l)) * scale;
        r.pass = r.value >= r.bound;
        reports.push_back(std::move(r));
      }
    }
  }

  // Estimator optimism at horizon-tuned batch count, Monte Carlo.
  {
    const McEstimate mc = optimism_probability_mc(0.5, 200, 40, trials, flags.seed);
    VerificationReport r;
    r.claim = "optimism-mc";
    r.params = "mu=0.5;n=200;l=40;trials=" + std::to_string(trials);
    r.value = mc.estimate;
    r.std_error = mc.std_error;
    r.bound = (1.0 - std::pow(0.75, 40) - 4.0 * mc.std_error) * scale;
    r.pass = r.value >= r.bound;
    reports.push_back(std::move(r));
  }

  // Concentration: empirical violation rate across a small (n, l, mu) grid.
  {
    const double delta = 0.1;
    const std::int64_t horizon = 2000;
    const struct {
      std::int64_t n;
      int l;
      double mu;
    } grid[] = {{10, 1, 0.5},   {50, 1, 0.2},   {50, 5, 0.5},   {100, 5, 0.8},
                {200, 10, 0.5}, {200, 10, 0.1}, {400, 20, 0.5}, {800, 20, 0.3},
                {1000, 40, 0.5}, {2000, 40, 0.9}};
    const std::int64_t grid_trials = flags.quick ? 2000 : 10000;
    int point = 0;
    for (const auto& g : grid) {
      const double sigma2 = g.mu * (1.0 - g.mu);
      const double rate =
          concentration_check(g.mu, sigma2, g.n, g.l, horizon, delta, grid_trials,
                              flags.seed + static_cast<std::uint64_t>(point));
      VerificationReport r;
      r.claim = "concentration-mc";
      r.params = "n=" + std::to_string(g.n) + ";l=" + std::to_string(g.l) +
                 ";mu=" + std::to_string(g.mu) + ";delta=0.1";
      r.value = rate;
      r.bound = delta / scale;
      r.pass = r.value <= r.bound;
      reports.push_back(std::move(r));
      ++point;
    }
  }

  // Anti-concentration conjecture scans (informative: never fail the suite).
  const std::vector<std::int64_t> n_grid = {1, 2, 3, 5, 8, 13, 21, 34, 55, 89};
  const std::size_t first_conjecture = reports.size();
  for (const Arm& arm : {Arm::exponential(2.0), Arm::uniform(0.0, 1.0),
                         Arm::bernoulli(0.5), Arm::scaled_bernoulli(1.0, 1.0)}) {
    auto scan = conjecture_scan(arm, n_grid, flags.quick ? 10000 : trials, flags.seed);
    for (auto& r : scan) reports.push_back(std::move(r));
  }

  std::size_t failures = 0;
  for (std::size_t i = 0; i < first_conjecture; ++i)
    if (!reports[i].pass) ++failures;

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!flags.out.empty()) {
    file.open(flags.out, std::ios::binary);
    if (!file) {
      std::cerr << "cannot open output file '" << flags.out << "'\n";
      return 2;
    }
    os = &file;
  }
  *os << verification_csv_header() << "\n";
  for (const auto& r : reports) *os << verification_csv_row(r) << "\n";

  std::cerr << reports.size() << " checks, " << failures << " blocking failure(s)\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch-ensemble bandit experiments and verification suite"};
  app.require_subcommand(1);

  RunFlags run_flags;
  RunOptions opts;
  CLI::App* run = app.add_subcommand("run", "Run an experiment preset and write CSV");
  run->add_option("--config", run_flags.config_path, "Config file (key = value lines)");
  opts.preset = run->add_option("--preset", run_flags.preset,
                                "testcase1..testcase5 or custom");
  opts.policies = run->add_option("--policies", run_flags.policies,
                                  "Comma-separated policy specs");
  opts.horizon = run->add_option("--T", run_flags.horizon, "Steps per episode (default 2000)");
  opts.sims = run->add_option("--sims", run_flags.sims,
                              "Simulations per policy (default 100)");
  opts.seed = run->add_option("--seed", run_flags.seed, "Base seed (episode i uses seed+i)");
  opts.delta = run->add_option("--delta", run_flags.delta,
                               "Confidence level for horizon-tuned policies (default 0.05)");
  opts.out = run->add_option("--out", run_flags.out, "Output CSV path");
  opts.parallel = run->add_option("--parallel", run_flags.parallel,
                                  "Worker threads (results independent of this)");
  run->add_flag("--efficient", run_flags.efficient,
                "Incremental-refill estimator for ensemble policies");
  run->add_flag("--full", run_flags.full, "Full-history estimator (default)");
  opts.warmup_sigma = run->add_option("--warmup-sigma", run_flags.warmup_sigma,
                                      "Variance lower bound enabling the per-batch warmup");
  opts.bernoullify = run->add_option("--bernoullify", run_flags.bernoullify_scale,
                                     "Replace losses in [0,b] with b*Ber(loss/b)");
  opts.arms = run->add_option("--arms", run_flags.arms,
                              "Arm specs for preset=custom, e.g. bernoulli:0.1,gaussian:0.5:1");
  run->add_option("--chart", run_flags.chart_path, "Also write a static SVG chart");

  VerifyFlags verify_flags;
  CLI::App* verify = app.add_subcommand("verify", "Run the numerical verification grids");
  verify->add_flag("--quick", verify_flags.quick, "Small grids, ~seconds");
  verify->add_option("--trials", verify_flags.trials, "Monte-Carlo trials per point");
  verify->add_option("--seed", verify_flags.seed, "Monte-Carlo seed");
  verify->add_option("--out", verify_flags.out, "Report CSV path (default stdout)");
  verify->add_option("--bound-scale", verify_flags.bound_scale,
                     "Scales pass thresholds; >1 injects failures (testing hook)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_experiment_command(merge_flags(run_flags, opts), run_flags.chart_path);
    if (verify->parsed()) return run_verify_command(verify_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
