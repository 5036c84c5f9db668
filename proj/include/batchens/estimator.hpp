#pragma once

#include <cstdint>
#include <vector>

namespace batchens {

// One batch of an arm's samples: how many were assigned to it and their sum.
struct BatchStat {
  std::int64_t count = 0;
  double sum = 0.0;

  // Shrunk batch mean. An empty batch contributes 0/2 = 0, which is what
  // makes the min-estimate optimistic before every batch has data.
  double shrunk_mean() const { return sum / static_cast<double>(count + 2); }
};

enum class EstimatorMode {
  // Keeps every observed loss; growing the batch count redistributes the
  // whole history round-robin. O(n) memory per arm.
  FullHistory,
  // Keeps only (count, sum) per batch; growing the batch count appends empty
  // batches that are refilled before the old ones receive new samples.
  // O(batches) memory per arm.
  Efficient,
};

// Per-arm batch-min mean estimator. Samples are spread over `l` batches
// (round-robin in FullHistory mode, fill-the-emptiest in Efficient mode) and
// the estimate is the minimum shrunk batch mean sum/(count+2).
class ArmEstimator {
 public:
  explicit ArmEstimator(EstimatorMode mode, int initial_batches = 1);

  void observe(double loss);

  // Grows the batch count. Shrinking is rejected: schedules are
  // nondecreasing and a shrink would discard batch identity.
  void rebatch(int new_batch_count);

  // min over batches of sum/(count+2); 0 whenever some batch is empty.
  double estimate() const;

  // Shrunk mean of every batch, in batch order.
  std::vector<double> batch_estimates() const;

  int batch_count() const { return static_cast<int>(batches_.size()); }
  std::int64_t samples() const { return n_; }
  EstimatorMode mode() const { return mode_; }
  const std::vector<BatchStat>& batches() const { return batches_; }

  // FullHistory mode only (empty otherwise).
  const std::vector<double>& history() const { return history_; }

 private:
  EstimatorMode mode_;
  std::vector<BatchStat> batches_;
  std::vector<double> history_;
  std::int64_t n_ = 0;
};

// Batch-count schedule for the ensemble policies.
struct BatchSchedule {
  enum class Kind { Fixed, Anytime };

  Kind kind = Kind::Anytime;
  int fixed_batches = 1;

  static BatchSchedule fixed(int batches);
  static BatchSchedule anytime() { return BatchSchedule{Kind::Anytime, 1}; }

  int batches_at(std::int64_t t) const;
};

// Horizon-tuned batch count ceil(3.5 * ln(2T/delta)), at least 1.
// Throws std::invalid_argument unless 0 < delta < 1 and T >= 1.
int fixed_batch_count(std::int64_t horizon, double delta);

// Horizon-free batch count max(1, ceil(8 * ln t)).
int anytime_batch_count(std::int64_t t);

}  // namespace batchens
