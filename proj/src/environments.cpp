#include "batchens/environments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace batchens {

Arm Arm::bernoulli(double mean) {
  if (!(mean >= 0.0) || !(mean <= 1.0))
    throw std::invalid_argument("Arm::bernoulli: mean must lie in [0, 1]");
  return Arm{ArmKind::Bernoulli, mean, 0.0};
}

Arm Arm::gaussian(double mean, double sigma) {
  if (!(sigma > 0.0))
    throw std::invalid_argument("Arm::gaussian: sigma must be > 0");
  return Arm{ArmKind::Gaussian, mean, sigma};
}

Arm Arm::exponential(double rate) {
  if (!(rate > 0.0))
    throw std::invalid_argument("Arm::exponential: rate must be > 0");
  return Arm{ArmKind::Exponential, rate, 0.0};
}

Arm Arm::scaled_bernoulli(double scale, double mean) {
  if (!(scale > 0.0) || !(mean >= 0.0) || !(mean <= scale))
    throw std::invalid_argument("Arm::scaled_bernoulli: need 0 <= mean <= scale, scale > 0");
  return Arm{ArmKind::ScaledBernoulli, scale, mean};
}

Arm Arm::uniform(double lo, double hi) {
  if (!(lo <= hi))
    throw std::invalid_argument("Arm::uniform: need lo <= hi");
  return Arm{ArmKind::Uniform, lo, hi};
}

double Arm::true_mean() const {
  switch (kind) {
    case ArmKind::Bernoulli: return param_a;
    case ArmKind::Gaussian: return param_a;
    case ArmKind::Exponential: return 1.0 / param_a;
    case ArmKind::ScaledBernoulli: return param_b;
    case ArmKind::Uniform: return 0.5 * (param_a + param_b);
  }
  return 0.0;
}

double Arm::true_variance() const {
  switch (kind) {
    case ArmKind::Bernoulli: return param_a * (1.0 - param_a);
    case ArmKind::Gaussian: return param_b * param_b;
    case ArmKind::Exponential: return 1.0 / (param_a * param_a);
    case ArmKind::ScaledBernoulli: return param_b * (param_a - param_b);
    case ArmKind::Uniform: {
      const double w = param_b - param_a;
      return w * w / 12.0;
    }
  }
  return 0.0;
}

double Arm::sample(Rng& rng) const {
  switch (kind) {
    case ArmKind::Bernoulli: return rng.uniform() < param_a ? 1.0 : 0.0;
    case ArmKind::Gaussian: return param_a + param_b * rng.gaussian();
    case ArmKind::Exponential: return rng.exponential(param_a);
    case ArmKind::ScaledBernoulli:
      return rng.uniform() < param_b / param_a ? param_a : 0.0;
    case ArmKind::Uniform: return rng.uniform(param_a, param_b);
  }
  return 0.0;
}

std::string Arm::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case ArmKind::Bernoulli: os << "bernoulli:" << param_a; break;
    case ArmKind::Gaussian: os << "gaussian:" << param_a << ":" << param_b; break;
    case ArmKind::Exponential: os << "exponential:" << param_a; break;
    case ArmKind::ScaledBernoulli: os << "scaled-bernoulli:" << param_a << ":" << param_b; break;
    case ArmKind::Uniform: os << "uniform:" << param_a << ":" << param_b; break;
  }
  return os.str();
}

double Bandit::optimal_mean() const {
  if (arms.empty()) throw std::logic_error("Bandit: no arms");
  double best = std::numeric_limits<double>::infinity();
  for (const Arm& a : arms) best = std::min(best, a.true_mean());
  return best;
}

double Bandit::gap(int arm) const {
  if (arm < 0 || arm >= num_arms())
    throw std::out_of_range("Bandit::gap: bad arm index");
  return arms[static_cast<std::size_t>(arm)].true_mean() - optimal_mean();
}

double bernoullify(double loss, double scale, Rng& rng, bool rescale) {
  if (!(scale > 0.0))
    throw std::invalid_argument("bernoullify: scale must be > 0");
  if (!(loss >= 0.0) || !(loss <= scale))
    throw std::invalid_argument("bernoullify: loss must lie in [0, scale]");
  const double one = rng.uniform() < loss / scale ? 1.0 : 0.0;
  return rescale ? scale * one : one;
}

}  // namespace batchens
