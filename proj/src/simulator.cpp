#include "batchens/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace batchens {

namespace {
// Stream tags keep the per-purpose rng streams inside one episode disjoint.
constexpr std::uint64_t kArmStreamTag = 1;
constexpr std::uint64_t kMeansStreamTag = 2;
}  // namespace

std::string PolicyConfig::label() const {
  switch (type) {
    case Type::EnsembleFixed:
      return fixed_batches > 0 ? "EnsembleFixed:" + std::to_string(fixed_batches)
                               : "EnsembleFixed";
    case Type::EnsembleAnytime: return "EnsembleAnytime";
    case Type::EnsembleAnytimeEfficient: return "EnsembleAnytimeEfficient";
    case Type::Ucb: return "UCB";
    case Type::UcbV: return "UCB-V";
    case Type::KlUcb: return "KL-UCB";
    case Type::Mars: return "MARS";
  }
  return "?";
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& config, int num_arms,
                                    std::int64_t horizon, std::uint64_t seed) {
  switch (config.type) {
    case PolicyConfig::Type::EnsembleFixed: {
      const int l = config.fixed_batches > 0
                        ? config.fixed_batches
                        : fixed_batch_count(horizon, config.delta);
      return std::make_unique<BatchEnsemblePolicy>(
          num_arms, seed, BatchSchedule::fixed(l), config.estimator_mode,
          config.warmup_per_batch);
    }
    case PolicyConfig::Type::EnsembleAnytime:
      return std::make_unique<BatchEnsemblePolicy>(
          num_arms, seed, BatchSchedule::anytime(), config.estimator_mode,
          config.warmup_per_batch);
    case PolicyConfig::Type::EnsembleAnytimeEfficient:
      return std::make_unique<BatchEnsemblePolicy>(
          num_arms, seed, BatchSchedule::anytime(), EstimatorMode::Efficient,
          config.warmup_per_batch);
    case PolicyConfig::Type::Ucb:
      return std::make_unique<UcbPolicy>(num_arms, seed, config.ucb_alpha);
    case PolicyConfig::Type::UcbV:
      return std::make_unique<UcbVPolicy>(num_arms, seed, config.ucbv_range);
    case PolicyConfig::Type::KlUcb:
      return std::make_unique<KlUcbPolicy>(num_arms, seed, config.kl_family,
                                           config.kl_gaussian_sigma);
    case PolicyConfig::Type::Mars:
      return std::make_unique<MarsPolicy>(num_arms, seed, config.mars_subsets_scale);
  }
  throw std::logic_error("make_policy: unknown policy type");
}

Trajectory run_episode(const PolicyConfig& policy_config, const Bandit& bandit,
                       std::int64_t horizon, std::uint64_t seed,
                       bool record_losses) {
  if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
  const int num_arms = bandit.num_arms();

  auto policy = make_policy(policy_config, num_arms, horizon, seed);

  std::vector<Rng> arm_streams;
  arm_streams.reserve(static_cast<std::size_t>(num_arms));
  for (int a = 0; a < num_arms; ++a)
    arm_streams.push_back(Rng::stream(seed, kArmStreamTag, static_cast<std::uint64_t>(a)));

  std::vector<double> gaps(static_cast<std::size_t>(num_arms));
  for (int a = 0; a < num_arms; ++a) gaps[static_cast<std::size_t>(a)] = bandit.gap(a);

  Trajectory out;
  out.seed = seed;
  out.actions.reserve(static_cast<std::size_t>(horizon));
  out.regret_path.reserve(static_cast<std::size_t>(horizon));
  out.pull_counts.assign(static_cast<std::size_t>(num_arms), 0);
  if (record_losses) out.losses.reserve(static_cast<std::size_t>(horizon));

  double regret = 0.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    const int arm = policy->select_action();
    Rng& stream = arm_streams[static_cast<std::size_t>(arm)];
    double loss = bandit.arms[static_cast<std::size_t>(arm)].sample(stream);
    if (bandit.bernoullify_scale > 0.0)
      loss = bernoullify(loss, bandit.bernoullify_scale, stream);
    policy->update(arm, loss);

    out.actions.push_back(arm);
    out.pull_counts[static_cast<std::size_t>(arm)] += 1;
    regret += gaps[static_cast<std::size_t>(arm)];
    out.regret_path.push_back(regret);
    if (record_losses) out.losses.push_back(loss);
  }
  return out;
}

BanditSpec BanditSpec::fixed_bandit(Bandit b) {
  BanditSpec spec;
  spec.kind = Kind::Fixed;
  spec.fixed = std::move(b);
  return spec;
}

Bandit BanditSpec::instantiate(std::uint64_t base_seed, int sim_index) const {
  if (kind == Kind::Fixed) {
    Bandit bandit = fixed;
    if (bernoullify_scale > 0.0) bandit.bernoullify_scale = bernoullify_scale;
    return bandit;
  }
  // Dedicated mean stream per simulation, independent of the episode streams
  // and therefore identical for every policy in that simulation.
  Rng rng = Rng::stream(base_seed, kMeansStreamTag, static_cast<std::uint64_t>(sim_index));
  Bandit bandit;
  bandit.bernoullify_scale = bernoullify_scale;
  bandit.arms.reserve(static_cast<std::size_t>(random_arms));
  for (int a = 0; a < random_arms; ++a) {
    switch (kind) {
      case Kind::RandomBernoulli:
        bandit.arms.push_back(Arm::bernoulli(rng.uniform()));
        break;
      case Kind::RandomGaussian:
        bandit.arms.push_back(Arm::gaussian(rng.uniform(), gaussian_sigma));
        break;
      case Kind::RandomExponential:
        bandit.arms.push_back(Arm::exponential(rng.uniform(rate_min, rate_max)));
        break;
      case Kind::Fixed:
        break;
    }
  }
  return bandit;
}

const ExperimentResult::PolicySeries& ExperimentResult::find(
    const std::string& policy) const {
  for (const PolicySeries& s : series)
    if (s.policy == policy) return s;
  throw std::out_of_range("ExperimentResult: no series for policy " + policy);
}

ExperimentResult run_experiment(const std::vector<PolicyConfig>& policies,
                                const BanditSpec& bandit_spec, std::int64_t horizon,
                                int simulations, std::uint64_t base_seed,
                                int threads) {
  if (simulations < 1)
    throw std::invalid_argument("run_experiment: need at least one simulation");
  if (policies.empty())
    throw std::invalid_argument("run_experiment: need at least one policy");
  threads = std::max(1, threads);

  const std::size_t num_policies = policies.size();
  const auto t_size = static_cast<std::size_t>(horizon);

  // regret_paths[p][i] = full path of simulation i under policy p.
  std::vector<std::vector<std::vector<double>>> regret_paths(
      num_policies, std::vector<std::vector<double>>(static_cast<std::size_t>(simulations)));

  const int total_jobs = static_cast<int>(num_policies) * simulations;
  std::atomic<int> next_job{0};
  auto worker = [&]() {
    for (;;) {
      const int job = next_job.fetch_add(1);
      if (job >= total_jobs) return;
      const std::size_t p = static_cast<std::size_t>(job) % num_policies;
      const int sim = job / static_cast<int>(num_policies);
      const Bandit bandit = bandit_spec.instantiate(base_seed, sim);
      Trajectory traj = run_episode(policies[p], bandit, horizon,
                                    base_seed + static_cast<std::uint64_t>(sim));
      regret_paths[p][static_cast<std::size_t>(sim)] = std::move(traj.regret_path);
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  ExperimentResult result;
  result.horizon = horizon;
  result.simulations = simulations;
  result.base_seed = base_seed;
  result.series.resize(num_policies);

  for (std::size_t p = 0; p < num_policies; ++p) {
    ExperimentResult::PolicySeries& s = result.series[p];
    s.policy = policies[p].label();
    s.mean_regret.assign(t_size, 0.0);
    s.std_regret.assign(t_size, 0.0);
    s.final_regrets.reserve(static_cast<std::size_t>(simulations));

    // Reduce in simulation order: bit-stable regardless of thread count.
    std::vector<double> sum(t_size, 0.0), sum_sq(t_size, 0.0);
    for (int sim = 0; sim < simulations; ++sim) {
      const std::vector<double>& path = regret_paths[p][static_cast<std::size_t>(sim)];
      for (std::size_t t = 0; t < t_size; ++t) {
        sum[t] += path[t];
        sum_sq[t] += path[t] * path[t];
      }
      s.final_regrets.push_back(path.back());
    }
    const double n = static_cast<double>(simulations);
    for (std::size_t t = 0; t < t_size; ++t) {
      const double mean = sum[t] / n;
      s.mean_regret[t] = mean;
      s.std_regret[t] = std::sqrt(std::max(0.0, sum_sq[t] / n - mean * mean));
    }
  }
  return result;
}

RegretBounds fixed_batch_regret_bounds(const Bandit& bandit, std::int64_t horizon, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("fixed_batch_regret_bounds: delta must lie in (0, 1)");
  const double K = bandit.num_arms();
  const double log_term =
      std::log(6.0 * static_cast<double>(horizon) * K / delta);
  const double mu_star = bandit.optimal_mean();

  double gap_sum = 0.0;
  double var_sum = 0.0;
  for (int a = 0; a < bandit.num_arms(); ++a) {
    const double gap = bandit.gap(a);
    if (gap <= 0.0) continue;
    const double var = bandit.arms[static_cast<std::size_t>(a)].true_variance();
    gap_sum += var / gap + 2.0;
    var_sum += var;
  }

  RegretBounds bounds;
  bounds.instance_dependent = 3.5 * gap_sum * log_term * log_term;
  bounds.instance_independent =
      std::sqrt(14.0 * static_cast<double>(horizon) * std::min(mu_star * K, var_sum)) *
          log_term +
      11.0 * K * log_term * log_term;
  return bounds;
}

RegretBounds anytime_regret_bounds(const Bandit& bandit, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("anytime_regret_bounds: t must be >= 1");
  const double K = bandit.num_arms();
  const double log_term = std::log(72.0 * static_cast<double>(t));
  const double mu_star = bandit.optimal_mean();

  double gap_sum = 0.0;
  double var_sum = 0.0;
  for (int a = 0; a < bandit.num_arms(); ++a) {
    const double gap = bandit.gap(a);
    if (gap <= 0.0) continue;
    const double var = bandit.arms[static_cast<std::size_t>(a)].true_variance();
    gap_sum += 9.0 * (8.0 * var / gap + 4.0 / 3.0);
    var_sum += var;
  }

  RegretBounds bounds;
  bounds.instance_dependent = gap_sum * log_term * log_term;
  bounds.instance_independent =
      17.0 * std::sqrt(static_cast<double>(t) * std::min(mu_star * K, var_sum)) * log_term +
      84.0 * K * log_term * log_term;
  return bounds;
}

}  // namespace batchens
