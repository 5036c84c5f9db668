#include "batchens/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace batchens {

ArmEstimator::ArmEstimator(EstimatorMode mode, int initial_batches)
    : mode_(mode) {
  if (initial_batches < 1)
    throw std::invalid_argument("ArmEstimator: batch count must be >= 1");
  batches_.resize(static_cast<std::size_t>(initial_batches));
}

void ArmEstimator::observe(double loss) {
  std::size_t target;
  if (mode_ == EstimatorMode::FullHistory) {
    // Sample number n_+1 goes to batch n_ mod l: the round-robin rule.
    history_.push_back(loss);
    target = static_cast<std::size_t>(n_ % static_cast<std::int64_t>(batches_.size()));
  } else {
    // Fill the emptiest batch, lowest index on ties. Keeps counts within one
    // of each other and refills batches appended by rebatch() first.
    target = 0;
    for (std::size_t b = 1; b < batches_.size(); ++b) {
      if (batches_[b].count < batches_[target].count) target = b;
    }
  }
  batches_[target].count += 1;
  batches_[target].sum += loss;
  n_ += 1;
}

void ArmEstimator::rebatch(int new_batch_count) {
  const int current = batch_count();
  if (new_batch_count < current)
    throw std::invalid_argument("ArmEstimator::rebatch: batch count may not shrink");
  if (new_batch_count == current) return;

  if (mode_ == EstimatorMode::FullHistory) {
    batches_.assign(static_cast<std::size_t>(new_batch_count), BatchStat{});
    for (std::size_t i = 0; i < history_.size(); ++i) {
      BatchStat& b = batches_[i % batches_.size()];
      b.count += 1;
      b.sum += history_[i];
    }
  } else {
    batches_.resize(static_cast<std::size_t>(new_batch_count));
  }
}

double ArmEstimator::estimate() const {
  double best = std::numeric_limits<double>::infinity();
  for (const BatchStat& b : batches_) best = std::min(best, b.shrunk_mean());
  return best;
}

std::vector<double> ArmEstimator::batch_estimates() const {
  std::vector<double> out;
  out.reserve(batches_.size());
  for (const BatchStat& b : batches_) out.push_back(b.shrunk_mean());
  return out;
}

BatchSchedule BatchSchedule::fixed(int batches) {
  if (batches < 1)
    throw std::invalid_argument("BatchSchedule::fixed: batch count must be >= 1");
  return BatchSchedule{Kind::Fixed, batches};
}

int BatchSchedule::batches_at(std::int64_t t) const {
  return kind == Kind::Fixed ? fixed_batches : anytime_batch_count(t);
}

int fixed_batch_count(std::int64_t horizon, double delta) {
  if (horizon < 1)
    throw std::invalid_argument("fixed_batch_count: horizon must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("fixed_batch_count: delta must lie in (0, 1)");
  const double l = std::ceil(3.5 * std::log(2.0 * static_cast<double>(horizon) / delta));
  return std::max(1, static_cast<int>(l));
}

int anytime_batch_count(std::int64_t t) {
  if (t < 1) throw std::invalid_argument("anytime_batch_count: t must be >= 1");
  const double l = std::ceil(8.0 * std::log(static_cast<double>(t)));
  return std::max(1, static_cast<int>(l));
}

}  // namespace batchens
