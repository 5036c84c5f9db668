#include "batchens/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace batchens {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEuler = 2.718281828459045235360287471353;
}  // namespace

Policy::Policy(int num_arms, std::uint64_t seed)
    : rng_(Rng::stream(seed, 0x706f6c6963ULL)),  // policy stream tag
      num_arms_(num_arms),
      pulls_(static_cast<std::size_t>(num_arms), 0) {
  if (num_arms < 1) throw std::invalid_argument("Policy: need at least one arm");
}

int Policy::argmin_random_tie(std::span<const double> values, Rng& rng) {
  double best = kInf;
  int ties = 0;
  int chosen = 0;
  // Single-pass reservoir over the minimizer set, fixed arm order.
  for (int a = 0; a < static_cast<int>(values.size()); ++a) {
    const double v = values[static_cast<std::size_t>(a)];
    if (v < best) {
      best = v;
      ties = 1;
      chosen = a;
    } else if (v == best) {
      ++ties;
      if (rng.below(static_cast<std::uint64_t>(ties)) == 0) chosen = a;
    }
  }
  return chosen;
}

int Policy::select_action() {
  if (pending_arm_ >= 0)
    throw std::logic_error("Policy::select_action: previous step not updated yet");
  const std::int64_t t = t_ + 1;
  begin_step(t);
  scratch_indices_.resize(static_cast<std::size_t>(num_arms_));
  for (int a = 0; a < num_arms_; ++a)
    scratch_indices_[static_cast<std::size_t>(a)] = index(a, t);
  pending_arm_ = argmin_random_tie(scratch_indices_, rng_);
  return pending_arm_;
}

void Policy::update(int arm, double loss) {
  if (pending_arm_ < 0)
    throw std::logic_error("Policy::update: no pending selection");
  if (arm != pending_arm_)
    throw std::logic_error("Policy::update: arm does not match the selected one");
  pulls_[static_cast<std::size_t>(arm)] += 1;
  record(arm, loss);
  t_ += 1;
  pending_arm_ = -1;
}

// ---------------------------------------------------------------------------
// Batch Ensemble
// ---------------------------------------------------------------------------

BatchEnsemblePolicy::BatchEnsemblePolicy(int num_arms, std::uint64_t seed,
                                         BatchSchedule schedule,
                                         EstimatorMode estimator_mode,
                                         int warmup_per_batch, std::string label)
    : Policy(num_arms, seed),
      schedule_(schedule),
      warmup_per_batch_(warmup_per_batch),
      label_(std::move(label)) {
  if (warmup_per_batch < 0)
    throw std::invalid_argument("BatchEnsemblePolicy: warmup must be >= 0");
  current_batches_ = schedule_.batches_at(1);
  estimators_.reserve(static_cast<std::size_t>(num_arms));
  for (int a = 0; a < num_arms; ++a)
    estimators_.emplace_back(estimator_mode, current_batches_);
  if (label_.empty()) {
    if (schedule.kind == BatchSchedule::Kind::Fixed)
      label_ = "EnsembleFixed:" + std::to_string(schedule.fixed_batches);
    else
      label_ = estimator_mode == EstimatorMode::Efficient ? "EnsembleAnytimeEfficient"
                                                          : "EnsembleAnytime";
  }
}

void BatchEnsemblePolicy::begin_step(std::int64_t t) {
  const int l = schedule_.batches_at(t);
  if (l > current_batches_) {
    for (ArmEstimator& est : estimators_) est.rebatch(l);
    current_batches_ = l;
  }
  if (warmup_per_batch_ > 0) {
    const std::int64_t need =
        static_cast<std::int64_t>(warmup_per_batch_) * current_batches_;
    in_warmup_ = false;
    for (const ArmEstimator& est : estimators_) {
      if (est.samples() < need) {
        in_warmup_ = true;
        break;
      }
    }
  }
}

double BatchEnsemblePolicy::index(int arm, std::int64_t) {
  const ArmEstimator& est = estimators_[static_cast<std::size_t>(arm)];
  if (in_warmup_) {
    // Round-robin: the least-sampled arm (ties random) wins until every arm
    // has warmup_per_batch samples in each batch.
    const std::int64_t need =
        static_cast<std::int64_t>(warmup_per_batch_) * current_batches_;
    return est.samples() < need ? static_cast<double>(est.samples()) : kInf;
  }
  return est.estimate();
}

void BatchEnsemblePolicy::record(int arm, double loss) {
  estimators_[static_cast<std::size_t>(arm)].observe(loss);
}

BatchEnsemblePolicy::DistributedChoice BatchEnsemblePolicy::distributed_choice() const {
  DistributedChoice best{0, 0, kInf};
  for (int b = 0; b < current_batches_; ++b) {
    // Batch b's own proposal: the arm whose b-th batch mean is smallest.
    int arm = 0;
    double value = kInf;
    for (int a = 0; a < num_arms(); ++a) {
      const double v =
          estimators_[static_cast<std::size_t>(a)].batches()[static_cast<std::size_t>(b)].shrunk_mean();
      if (v < value) {
        value = v;
        arm = a;
      }
    }
    if (value < best.estimate) best = DistributedChoice{arm, b, value};
  }
  return best;
}

const ArmEstimator& BatchEnsemblePolicy::estimator(int arm) const {
  return estimators_.at(static_cast<std::size_t>(arm));
}

ArmEstimator& BatchEnsemblePolicy::estimator(int arm) {
  return estimators_.at(static_cast<std::size_t>(arm));
}

// ---------------------------------------------------------------------------
// Index formulas
// ---------------------------------------------------------------------------

double ucb_index(double mean, std::int64_t n, std::int64_t t, double alpha) {
  return mean - std::sqrt(alpha * std::log(static_cast<double>(t)) / static_cast<double>(n));
}

double ucbv_index(double mean, double var, std::int64_t n, std::int64_t t, double b) {
  const double log_t = std::log(static_cast<double>(t));
  const double nd = static_cast<double>(n);
  return mean - std::sqrt(2.0 * var * log_t / nd) - 3.0 * b * log_t / nd;
}

double klucb_budget(std::int64_t t) {
  const double td = static_cast<double>(t);
  return std::log(td) + 3.0 * std::log(std::log(std::max(td, kEuler)));
}

double kl_bernoulli(double p, double q) {
  auto term = [](double a, double b) {
    if (a <= 0.0) return 0.0;                                  // 0 log 0 = 0
    if (b <= 0.0) return std::numeric_limits<double>::infinity();
    return a * std::log(a / b);
  };
  return term(p, q) + term(1.0 - p, 1.0 - q);
}

double klucb_bernoulli_index_with_budget(double mean, std::int64_t n, double budget) {
  if (!(mean >= 0.0) || !(mean <= 1.0))
    throw std::invalid_argument("klucb index: mean must lie in [0, 1]");
  if (budget <= 0.0 || mean == 0.0) return mean;
  const double nd = static_cast<double>(n);
  double lo = 0.0, hi = mean;  // kl is decreasing in q on [0, mean]
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (nd * kl_bernoulli(mean, mid) > budget)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

double klucb_index(double mean, std::int64_t n, std::int64_t t) {
  return klucb_bernoulli_index_with_budget(mean, n, klucb_budget(t));
}

double mars_index(std::span<const double> samples, int num_subsets, Rng& rng) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("mars_index: empty sample set");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  double best = kInf;
  for (int s = 0; s < num_subsets; ++s) {
    const std::size_t size = 1 + static_cast<std::size_t>(rng.below(n));
    // Partial Fisher-Yates; the carried-over permutation does not bias the
    // subset law.
    double sum = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(order[i], order[j]);
      sum += samples[order[i]];
    }
    best = std::min(best, sum / static_cast<double>(size));
  }
  return best;
}

double mars_index_at(std::span<const double> samples, std::int64_t t, Rng& rng) {
  return mars_index(samples, anytime_batch_count(t), rng);
}

int warmup_size(double sigma_lower_bound) {
  if (!(sigma_lower_bound > 0.0))
    throw std::invalid_argument("warmup_size: sigma lower bound must be > 0");
  return static_cast<int>(std::ceil(4.0 / (sigma_lower_bound * sigma_lower_bound)));
}

// ---------------------------------------------------------------------------
// Baseline policies
// ---------------------------------------------------------------------------

UcbPolicy::UcbPolicy(int num_arms, std::uint64_t seed, double alpha)
    : Policy(num_arms, seed),
      alpha_(alpha),
      sums_(static_cast<std::size_t>(num_arms), 0.0) {
  if (!(alpha > 0.0)) throw std::invalid_argument("UcbPolicy: alpha must be > 0");
}

double UcbPolicy::index(int arm, std::int64_t t) {
  const std::int64_t n = pull_count(arm);
  if (n == 0) return -kInf;  // forced initial pull round
  return ucb_index(sums_[static_cast<std::size_t>(arm)] / static_cast<double>(n), n, t, alpha_);
}

void UcbPolicy::record(int arm, double loss) {
  sums_[static_cast<std::size_t>(arm)] += loss;
}

UcbVPolicy::UcbVPolicy(int num_arms, std::uint64_t seed, double range_scale)
    : Policy(num_arms, seed),
      range_scale_(range_scale),
      sums_(static_cast<std::size_t>(num_arms), 0.0),
      sum_squares_(static_cast<std::size_t>(num_arms), 0.0) {
  if (!(range_scale > 0.0))
    throw std::invalid_argument("UcbVPolicy: range scale must be > 0");
}

double UcbVPolicy::index(int arm, std::int64_t t) {
  const std::int64_t n = pull_count(arm);
  if (n == 0) return -kInf;
  const double nd = static_cast<double>(n);
  const double mean = sums_[static_cast<std::size_t>(arm)] / nd;
  const double var =
      std::max(0.0, sum_squares_[static_cast<std::size_t>(arm)] / nd - mean * mean);
  return ucbv_index(mean, var, n, t, range_scale_);
}

void UcbVPolicy::record(int arm, double loss) {
  sums_[static_cast<std::size_t>(arm)] += loss;
  sum_squares_[static_cast<std::size_t>(arm)] += loss * loss;
}

KlUcbPolicy::KlUcbPolicy(int num_arms, std::uint64_t seed, KlFamily family,
                         double gaussian_sigma)
    : Policy(num_arms, seed),
      family_(family),
      gaussian_sigma_(gaussian_sigma),
      sums_(static_cast<std::size_t>(num_arms), 0.0) {
  if (!(gaussian_sigma > 0.0))
    throw std::invalid_argument("KlUcbPolicy: sigma must be > 0");
}

double KlUcbPolicy::index(int arm, std::int64_t t) {
  const std::int64_t n = pull_count(arm);
  if (n == 0) return -kInf;
  const double nd = static_cast<double>(n);
  const double mean = sums_[static_cast<std::size_t>(arm)] / nd;
  const double budget = klucb_budget(t);
  switch (family_) {
    case KlFamily::Bernoulli:
      return klucb_bernoulli_index_with_budget(std::clamp(mean, 0.0, 1.0), n, budget);
    case KlFamily::Gaussian:
      // n (p-q)^2 / (2 sigma^2) = budget solved in closed form.
      return mean - gaussian_sigma_ * std::sqrt(2.0 * budget / nd);
    case KlFamily::Exponential: {
      // KL(Exp(mean p), Exp(mean q)) = ln(q/p) + p/q - 1, decreasing in q on
      // (0, p]; bisect for the smallest feasible q.
      if (!(mean > 0.0) || budget <= 0.0) return mean;
      auto kl = [mean](double q) { return std::log(q / mean) + mean / q - 1.0; };
      double lo = mean * 1e-12, hi = mean;
      if (nd * kl(lo) <= budget) return lo;
      while (hi - lo > 1e-9 * mean) {
        const double mid = 0.5 * (lo + hi);
        if (nd * kl(mid) > budget)
          lo = mid;
        else
          hi = mid;
      }
      return hi;
    }
  }
  return mean;
}

void KlUcbPolicy::record(int arm, double loss) {
  sums_[static_cast<std::size_t>(arm)] += loss;
}

MarsPolicy::MarsPolicy(int num_arms, std::uint64_t seed, double subsets_scale)
    : Policy(num_arms, seed),
      subsets_scale_(subsets_scale),
      histories_(static_cast<std::size_t>(num_arms)) {
  if (!(subsets_scale > 0.0))
    throw std::invalid_argument("MarsPolicy: subsets scale must be > 0");
}

double MarsPolicy::index(int arm, std::int64_t t) {
  const auto& hist = histories_[static_cast<std::size_t>(arm)];
  if (hist.empty()) return -kInf;
  const int subsets = std::max(
      1, static_cast<int>(std::ceil(subsets_scale_ * anytime_batch_count(t))));
  return mars_index(hist, subsets, rng_);
}

void MarsPolicy::record(int arm, double loss) {
  histories_[static_cast<std::size_t>(arm)].push_back(loss);
}

}  // namespace batchens
