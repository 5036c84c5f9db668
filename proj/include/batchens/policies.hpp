#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "batchens/estimator.hpp"
#include "batchens/rng.hpp"

namespace batchens {

// Stateful action-selection strategy over K arms, loss-minimization form.
// Protocol per step t: select_action() then update(selected arm, loss).
// update() rejects any other interleaving. All index ties are broken
// uniformly at random from the policy's own seeded stream, and per-arm
// reductions run in fixed arm order, so a seed fully determines the
// action sequence.
class Policy {
 public:
  Policy(int num_arms, std::uint64_t seed);
  virtual ~Policy() = default;

  virtual std::string name() const = 0;

  int select_action();
  void update(int arm, double loss);

  int num_arms() const { return num_arms_; }
  std::int64_t time() const { return t_; }  // completed steps
  std::int64_t pull_count(int arm) const { return pulls_[static_cast<std::size_t>(arm)]; }

 protected:
  // Called once when step t begins (before indices are computed).
  virtual void begin_step(std::int64_t t) { (void)t; }
  // Loss-form index of one arm at step t; the minimizer is played.
  virtual double index(int arm, std::int64_t t) = 0;
  virtual void record(int arm, double loss) = 0;

  // argmin over values with uniform tie-breaking from rng.
  static int argmin_random_tie(std::span<const double> values, Rng& rng);

  Rng rng_;

 private:
  int num_arms_;
  std::int64_t t_ = 0;
  std::vector<std::int64_t> pulls_;
  std::vector<double> scratch_indices_;
  int pending_arm_ = -1;
};

// Batch Ensemble: per arm, samples are split into l_t batches and the index
// is the minimum shrunk batch mean (0 while any batch is empty, so unpulled
// and under-explored arms stay competitive without forced pulls). When the
// schedule grows, every arm is rebatched before anything else happens at
// that step. An optional warmup pulls the least-sampled arm until every arm
// holds warmup_per_batch * l_t samples.
class BatchEnsemblePolicy final : public Policy {
 public:
  BatchEnsemblePolicy(int num_arms, std::uint64_t seed, BatchSchedule schedule,
                      EstimatorMode estimator_mode, int warmup_per_batch = 0,
                      std::string label = "");

  std::string name() const override { return label_; }

  // Equivalent decision route: each batch slot proposes its own best arm and
  // per-batch estimate, and the proposal of the batch with the smallest
  // estimate wins. Exposed for cross-checking against select_action's rule;
  // deterministic (first minimizer in index order, no rng consumed).
  struct DistributedChoice {
    int arm;
    int batch;
    double estimate;
  };
  DistributedChoice distributed_choice() const;

  const ArmEstimator& estimator(int arm) const;
  ArmEstimator& estimator(int arm);  // test/harness access for seeding histories
  int current_batches() const { return current_batches_; }

 protected:
  void begin_step(std::int64_t t) override;
  double index(int arm, std::int64_t t) override;
  void record(int arm, double loss) override;

 private:
  BatchSchedule schedule_;
  std::vector<ArmEstimator> estimators_;
  int current_batches_ = 1;
  int warmup_per_batch_ = 0;
  bool in_warmup_ = false;
  std::string label_;
};

// Loss-form UCB1 index: mean - sqrt(alpha * ln t / n).
double ucb_index(double mean, std::int64_t n, std::int64_t t, double alpha);

// Loss-form UCB-V index: mean - sqrt(2 * var * ln t / n) - 3 * b * ln t / n,
// b the loss range scale.
double ucbv_index(double mean, double var, std::int64_t n, std::int64_t t, double b);

// Exploration budget ln t + 3 ln ln max(t, e) shared by the KL indices.
double klucb_budget(std::int64_t t);

// Smallest q in [0, mean] with n * KL(Ber(mean), Ber(q)) <= budget, found by
// bisection to 1e-9. Throws std::invalid_argument if mean is outside [0, 1].
double klucb_bernoulli_index_with_budget(double mean, std::int64_t n, double budget);
double klucb_index(double mean, std::int64_t n, std::int64_t t);

// Bernoulli KL divergence with the 0 log 0 = 0 convention.
double kl_bernoulli(double p, double q);

// Minimum average over random subsets of the sample history; each subset
// size is uniform on {1..n}. The step-t form draws anytime_batch_count(t)
// subsets, matching what MarsPolicy does each round.
double mars_index(std::span<const double> samples, int num_subsets, Rng& rng);
double mars_index_at(std::span<const double> samples, std::int64_t t, Rng& rng);

// Samples per batch needed for the CLT-based anti-concentration warmup,
// ceil(4 / sigma^2) for a variance lower bound sigma^2. Throws on sigma <= 0.
int warmup_size(double sigma_lower_bound);

class UcbPolicy final : public Policy {
 public:
  UcbPolicy(int num_arms, std::uint64_t seed, double alpha = 2.0);
  std::string name() const override { return "UCB"; }

 protected:
  double index(int arm, std::int64_t t) override;
  void record(int arm, double loss) override;

 private:
  double alpha_;
  std::vector<double> sums_;
};

class UcbVPolicy final : public Policy {
 public:
  UcbVPolicy(int num_arms, std::uint64_t seed, double range_scale = 1.0);
  std::string name() const override { return "UCB-V"; }

 protected:
  double index(int arm, std::int64_t t) override;
  void record(int arm, double loss) override;

 private:
  double range_scale_;
  std::vector<double> sums_;
  std::vector<double> sum_squares_;
};

enum class KlFamily { Bernoulli, Gaussian, Exponential };

class KlUcbPolicy final : public Policy {
 public:
  KlUcbPolicy(int num_arms, std::uint64_t seed, KlFamily family = KlFamily::Bernoulli,
              double gaussian_sigma = 1.0);
  std::string name() const override { return "KL-UCB"; }

 protected:
  double index(int arm, std::int64_t t) override;
  void record(int arm, double loss) override;

 private:
  KlFamily family_;
  double gaussian_sigma_;
  std::vector<double> sums_;
};

// Subsample-minimum baseline: keeps full per-arm histories (O(T) memory per
// arm, O(T^2) total work) and scores each arm by the minimum average over
// freshly drawn random subsets each step.
class MarsPolicy final : public Policy {
 public:
  MarsPolicy(int num_arms, std::uint64_t seed, double subsets_scale = 1.0);
  std::string name() const override { return "MARS"; }

 protected:
  double index(int arm, std::int64_t t) override;
  void record(int arm, double loss) override;

 private:
  double subsets_scale_;
  std::vector<std::vector<double>> histories_;
};

}  // namespace batchens
