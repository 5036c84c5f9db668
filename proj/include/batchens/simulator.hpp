#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "batchens/environments.hpp"
#include "batchens/policies.hpp"

namespace batchens {

// Construction recipe for a policy; episodes build a fresh instance per run.
struct PolicyConfig {
  enum class Type {
    EnsembleFixed,
    EnsembleAnytime,
    EnsembleAnytimeEfficient,
    Ucb,
    UcbV,
    KlUcb,
    Mars,
  };

  Type type = Type::EnsembleAnytime;
  double ucb_alpha = 2.0;
  double ucbv_range = 1.0;
  double mars_subsets_scale = 1.0;
  // EnsembleFixed: explicit batch count, or 0 to derive from (horizon, delta).
  int fixed_batches = 0;
  double delta = 0.05;
  int warmup_per_batch = 0;
  // Ensemble estimator storage; the efficient variant pins Efficient.
  EstimatorMode estimator_mode = EstimatorMode::FullHistory;
  // Bernoulli unless the environment dictates otherwise (auto-selected by
  // the harness for Gaussian/Exponential bandits).
  KlFamily kl_family = KlFamily::Bernoulli;
  double kl_gaussian_sigma = 1.0;

  std::string label() const;
};

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, int num_arms,
                                    std::int64_t horizon, std::uint64_t seed);

// One policy-vs-bandit episode record.
struct Trajectory {
  std::vector<std::int32_t> actions;    // length T
  std::vector<double> regret_path;      // cumulative pseudo-regret, length T
  std::vector<std::int64_t> pull_counts;
  std::vector<double> losses;           // only if requested
  std::uint64_t seed = 0;

  double final_regret() const { return regret_path.empty() ? 0.0 : regret_path.back(); }
};

// Runs select -> sample -> update for T steps. Pseudo-regret accumulates the
// true gap of each chosen arm, never realized losses.
Trajectory run_episode(const PolicyConfig& policy, const Bandit& bandit,
                       std::int64_t horizon, std::uint64_t seed,
                       bool record_losses = false);

// Bandit source for an experiment: either one fixed instance or a family
// whose arm parameters are redrawn per simulation index (shared across
// policies) from a dedicated seed stream.
struct BanditSpec {
  enum class Kind { Fixed, RandomBernoulli, RandomGaussian, RandomExponential };

  Kind kind = Kind::Fixed;
  Bandit fixed;
  int random_arms = 10;
  double gaussian_sigma = 1.0;
  double rate_min = 0.01;  // exponential rates drawn uniform in [rate_min, rate_max]
  double rate_max = 1.0;
  double bernoullify_scale = 0.0;  // copied onto every instantiated bandit

  static BanditSpec fixed_bandit(Bandit b);

  Bandit instantiate(std::uint64_t base_seed, int sim_index) const;
};

struct ExperimentResult {
  struct PolicySeries {
    std::string policy;
    std::vector<double> mean_regret;  // index t-1 holds step t
    std::vector<double> std_regret;   // population std over simulations
    std::vector<double> final_regrets;  // one per simulation, in sim order
  };

  std::vector<PolicySeries> series;
  std::int64_t horizon = 0;
  int simulations = 0;
  std::uint64_t base_seed = 0;

  const PolicySeries& find(const std::string& policy) const;
};

// Runs N seeded episodes per policy (episode i uses seed base_seed + i, the
// same set for every policy; random-mean specs also share the drawn means
// across policies within a simulation). Episodes may run on several threads;
// aggregation always reduces in simulation order so the thread count never
// changes the result.
ExperimentResult run_experiment(const std::vector<PolicyConfig>& policies,
                                const BanditSpec& bandit, std::int64_t horizon,
                                int simulations, std::uint64_t base_seed,
                                int threads = 1);

struct RegretBounds {
  double instance_dependent = 0.0;
  double instance_independent = 0.0;
};

// High-probability regret bounds for the ensemble run with the horizon-tuned
// batch count ceil(3.5 ln(2T/delta)) at confidence delta. Arms with zero gap
// are excluded from the sums.
RegretBounds fixed_batch_regret_bounds(const Bandit& bandit, std::int64_t horizon,
                                       double delta);

// Expected-regret bounds for the horizon-free batch count ceil(8 ln t) at
// time t.
RegretBounds anytime_regret_bounds(const Bandit& bandit, std::int64_t t);

}  // namespace batchens
