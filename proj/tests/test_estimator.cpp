#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <vector>

#include "batchens/estimator.hpp"
#include "batchens/rng.hpp"

using namespace batchens;

namespace {

ArmEstimator feed(EstimatorMode mode, int batches, const std::vector<double>& losses) {
  ArmEstimator est(mode, batches);
  for (double loss : losses) est.observe(loss);
  return est;
}

// Reference batch layout: sample i (0-based) lands in batch i mod l.
std::vector<BatchStat> round_robin_reference(const std::vector<double>& history, int l) {
  std::vector<BatchStat> batches(static_cast<std::size_t>(l));
  for (std::size_t i = 0; i < history.size(); ++i) {
    BatchStat& b = batches[i % static_cast<std::size_t>(l)];
    b.count += 1;
    b.sum += history[i];
  }
  return batches;
}

}  // namespace

TEST_CASE("round-robin assignment, l=2, five samples") {
  const auto est = feed(EstimatorMode::FullHistory, 2, {1, 0, 1, 0, 1});
  REQUIRE(est.batch_count() == 2);
  CHECK(est.batches()[0].count == 3);  // samples 1,3,5
  CHECK(est.batches()[1].count == 2);  // samples 2,4
  CHECK(est.batches()[0].sum == 3.0);
  CHECK(est.batches()[1].sum == 0.0);
  CHECK(est.samples() == 5);
}

TEST_CASE("single batch, single zero sample") {
  const auto est = feed(EstimatorMode::FullHistory, 1, {0});
  CHECK(est.batches()[0].count == 1);
  CHECK(est.batches()[0].sum == 0.0);
  CHECK(est.samples() == 1);
}

TEST_CASE("l=2 with losses 1,0,1 puts sums (2,0) counts (2,1)") {
  const auto est = feed(EstimatorMode::FullHistory, 2, {1, 0, 1});
  CHECK(est.batches()[0].count == 2);
  CHECK(est.batches()[0].sum == 2.0);
  CHECK(est.batches()[1].count == 1);
  CHECK(est.batches()[1].sum == 0.0);
}

TEST_CASE("estimate examples") {
  SUBCASE("all batches empty -> 0") {
    const ArmEstimator est(EstimatorMode::FullHistory, 3);
    CHECK(est.estimate() == 0.0);
  }
  SUBCASE("l=1, losses [1,1] -> 0.5") {
    CHECK(feed(EstimatorMode::FullHistory, 1, {1, 1}).estimate() == doctest::Approx(0.5));
  }
  SUBCASE("l=2, losses [1,0,1] -> min(2/4, 0/3) = 0") {
    CHECK(feed(EstimatorMode::FullHistory, 2, {1, 0, 1}).estimate() == 0.0);
  }
}

TEST_CASE("batch_estimates examples and min dominance") {
  const auto est = feed(EstimatorMode::FullHistory, 2, {1, 0, 1});
  const auto estimates = est.batch_estimates();
  REQUIRE(estimates.size() == 2);
  CHECK(estimates[0] == doctest::Approx(0.5));
  CHECK(estimates[1] == 0.0);

  const ArmEstimator empty(EstimatorMode::FullHistory, 3);
  CHECK(empty.batch_estimates() == std::vector<double>{0.0, 0.0, 0.0});

  CHECK(feed(EstimatorMode::FullHistory, 1, {0, 0}).batch_estimates() ==
        std::vector<double>{0.0});

  // estimate() is the minimum of batch_estimates()
  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    const int l = 1 + static_cast<int>(rng.below(6));
    ArmEstimator random_est(EstimatorMode::FullHistory, l);
    const int n = static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) random_est.observe(rng.uniform());
    const auto values = random_est.batch_estimates();
    const double min_value = *std::min_element(values.begin(), values.end());
    CHECK(random_est.estimate() == min_value);
  }
}

TEST_CASE("rebatch full-history redistributes like a fresh round robin") {
  auto est = feed(EstimatorMode::FullHistory, 1, {1, 0, 1, 0});
  est.rebatch(2);
  CHECK(est.batches()[0].count == 2);  // samples 1,3
  CHECK(est.batches()[0].sum == 2.0);
  CHECK(est.batches()[1].count == 2);  // samples 2,4
  CHECK(est.batches()[1].sum == 0.0);
  CHECK(est.samples() == 4);
}

TEST_CASE("rebatch efficient appends an empty batch and refills it first") {
  ArmEstimator est(EstimatorMode::Efficient, 1);
  est.observe(0.5);
  est.observe(0.5);
  est.rebatch(2);
  REQUIRE(est.batch_count() == 2);
  CHECK(est.batches()[0].count == 2);
  CHECK(est.batches()[1].count == 0);
  est.observe(1.0);
  est.observe(1.0);
  CHECK(est.batches()[1].count == 2);  // both landed in the fresh batch
  CHECK(est.batches()[1].sum == 2.0);
  CHECK(est.batches()[0].count == 2);
}

TEST_CASE("rebatch with the same count is the identity, shrinking throws") {
  auto est = feed(EstimatorMode::FullHistory, 2, {1, 0, 1});
  const auto before = est.batches();
  est.rebatch(2);
  CHECK(est.batches()[0].count == before[0].count);
  CHECK(est.batches()[0].sum == before[0].sum);
  CHECK_THROWS_AS(est.rebatch(1), std::invalid_argument);
}

TEST_CASE("fixed_batch_count values and validation") {
  CHECK(fixed_batch_count(2000, 0.05) == 40);
  CHECK(fixed_batch_count(1, 0.99) == 3);
  CHECK_THROWS_AS(fixed_batch_count(2000, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fixed_batch_count(2000, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fixed_batch_count(2000, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(fixed_batch_count(0, 0.05), std::invalid_argument);

  // nondecreasing in T and in 1/delta
  int prev = 0;
  for (std::int64_t horizon : {1, 2, 5, 10, 100, 1000, 10000}) {
    const int l = fixed_batch_count(horizon, 0.05);
    CHECK(l >= prev);
    prev = l;
  }
  prev = 0;
  for (double delta : {0.5, 0.2, 0.1, 0.05, 0.01, 0.001}) {
    const int l = fixed_batch_count(2000, delta);
    CHECK(l >= prev);
    prev = l;
  }
}

TEST_CASE("anytime_batch_count values") {
  CHECK(anytime_batch_count(1) == 1);
  CHECK(anytime_batch_count(2000) == 61);
  CHECK(anytime_batch_count(800) == 54);
  // the count first exceeds 53 at t = 754
  CHECK(anytime_batch_count(753) == 53);
  CHECK(anytime_batch_count(754) == 54);

  int prev = 0;
  for (std::int64_t t = 1; t <= 5000; ++t) {
    const int l = anytime_batch_count(t);
    CHECK(l >= prev);
    prev = l;
  }
}

TEST_CASE("round-robin balance: batch counts differ by at most one") {
  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    const int l = 1 + static_cast<int>(rng.below(10));
    ArmEstimator est(EstimatorMode::FullHistory, l);
    const int n = static_cast<int>(rng.below(100));
    for (int i = 0; i < n; ++i) {
      est.observe(rng.uniform());
      std::int64_t lo = est.batches()[0].count, hi = lo;
      for (const auto& b : est.batches()) {
        lo = std::min(lo, b.count);
        hi = std::max(hi, b.count);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("efficient mode keeps balance while growing and after refills") {
  Rng rng(19);
  ArmEstimator est(EstimatorMode::Efficient, 1);
  int l = 1;
  for (int step = 0; step < 400; ++step) {
    if (step % 37 == 36) {
      ++l;
      est.rebatch(l);
      // right after growth the new batch is behind by the old batch size
      std::int64_t deficit = est.batches()[0].count - est.batches().back().count;
      CHECK(deficit >= 0);
    }
    est.observe(rng.uniform());
  }
  // enough samples since the last growth: balance restored
  for (int i = 0; i < 2 * l; ++i) est.observe(0.0);
  std::int64_t lo = est.batches()[0].count, hi = lo;
  for (const auto& b : est.batches()) {
    lo = std::min(lo, b.count);
    hi = std::max(hi, b.count);
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("full-history estimator rebatched on a schedule equals from-scratch") {
  Rng rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    ArmEstimator incremental(EstimatorMode::FullHistory, 1);
    std::vector<double> history;
    int l = 1;
    const int n = 1 + static_cast<int>(rng.below(120));
    for (int i = 0; i < n; ++i) {
      if (rng.below(8) == 0) {
        l += 1 + static_cast<int>(rng.below(3));
        incremental.rebatch(l);
      }
      const double loss = rng.bernoulli(0.4) ? 1.0 : 0.0;
      incremental.observe(loss);
      history.push_back(loss);

      const auto reference = round_robin_reference(history, l);
      REQUIRE(incremental.batches().size() == reference.size());
      for (std::size_t b = 0; b < reference.size(); ++b) {
        CHECK(incremental.batches()[b].count == reference[b].count);
        CHECK(incremental.batches()[b].sum == reference[b].sum);  // bitwise
      }
    }
  }
}

TEST_CASE("positive scaling multiplies every batch estimate") {
  Rng rng(29);
  for (double scale : {0.5, 3.0, 10.0}) {
    ArmEstimator base(EstimatorMode::FullHistory, 3);
    ArmEstimator scaled(EstimatorMode::FullHistory, 3);
    for (int i = 0; i < 50; ++i) {
      const double loss = rng.bernoulli(0.3) ? 1.0 : 0.0;
      base.observe(loss);
      scaled.observe(scale * loss);
    }
    const auto be = base.batch_estimates();
    const auto se = scaled.batch_estimates();
    for (std::size_t b = 0; b < be.size(); ++b)
      CHECK(se[b] == doctest::Approx(scale * be[b]).epsilon(1e-15));
    CHECK(scaled.estimate() == doctest::Approx(scale * base.estimate()).epsilon(1e-15));
  }
}

TEST_CASE("shrinkage bound for [0,1] losses") {
  Rng rng(31);
  for (int rep = 0; rep < 100; ++rep) {
    const int l = 1 + static_cast<int>(rng.below(5));
    ArmEstimator est(EstimatorMode::FullHistory, l);
    const int n = 1 + static_cast<int>(rng.below(60));
    for (int i = 0; i < n; ++i) est.observe(rng.uniform());
    std::int64_t tau_max = 0;
    for (const auto& b : est.batches()) tau_max = std::max(tau_max, b.count);
    CHECK(est.estimate() <= 1.0 - 2.0 / (static_cast<double>(tau_max) + 2.0) + 1e-12);
  }
}
