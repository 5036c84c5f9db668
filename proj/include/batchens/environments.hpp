#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchens/rng.hpp"

namespace batchens {

enum class ArmKind { Bernoulli, Gaussian, Exponential, ScaledBernoulli, Uniform };

// Immutable description of one loss distribution. Samplers take the Rng
// stream as a parameter so arms can be shared across simulations.
struct Arm {
  ArmKind kind = ArmKind::Bernoulli;
  double param_a = 0.0;  // Bernoulli/Gaussian: mean; Exponential: rate; ScaledBernoulli: scale b; Uniform: lo
  double param_b = 0.0;  // Gaussian: sigma; ScaledBernoulli: mean; Uniform: hi

  static Arm bernoulli(double mean);
  static Arm gaussian(double mean, double sigma);
  // Parameterized by the rate; the mean is 1/rate. Spelled out to avoid the
  // usual rate-vs-scale inversion bug.
  static Arm exponential(double rate);
  // Two-point loss on {0, scale} with the given mean (0 <= mean <= scale).
  static Arm scaled_bernoulli(double scale, double mean);
  static Arm uniform(double lo, double hi);

  double true_mean() const;
  double true_variance() const;
  double sample(Rng& rng) const;
  std::string describe() const;
};

// A bandit instance: the arm set plus an optional Bernoulli-fication wrapper
// that replaces each observed loss x in [0, b] with b * Ber(x / b) before the
// policy sees it. Gaps and pseudo-regret always use the raw arm means.
struct Bandit {
  std::vector<Arm> arms;
  double bernoullify_scale = 0.0;  // 0 disables the wrapper

  int num_arms() const { return static_cast<int>(arms.size()); }
  double optimal_mean() const;
  // Suboptimality gap true_mean(arm) - min_a true_mean(a), >= 0.
  double gap(int arm) const;
};

// One draw of b * Ber(loss / b) (or plain Ber(loss / b) with rescale=false).
// Preserves the conditional mean when rescaling. Throws std::invalid_argument
// if loss is outside [0, b] or b <= 0.
double bernoullify(double loss, double scale, Rng& rng, bool rescale = true);

}  // namespace batchens
