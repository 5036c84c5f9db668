#include "batchens/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "batchens/rng.hpp"

namespace batchens {

namespace {

double binomial_std_error(double p_hat, std::int64_t trials) {
  return std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat)) / static_cast<double>(trials));
}

}  // namespace

std::string verification_csv_header() {
  return "claim,params,value,std_error,bound,pass";
}

std::string verification_csv_row(const VerificationReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << r.claim << "," << r.params << "," << r.value << "," << r.std_error << ","
     << r.bound << "," << (r.pass ? 1 : 0);
  return os.str();
}

double binomial_anticoncentration(int n, double mu) {
  if (n < 1) throw std::invalid_argument("binomial_anticoncentration: n must be >= 1");
  if (!(mu >= 0.0) || !(mu <= 1.0))
    throw std::invalid_argument("binomial_anticoncentration: mu must lie in [0, 1]");
  if (mu == 0.0) return 1.0;  // all mass at 0 <= 0
  if (mu == 1.0) return 1.0;  // all mass at n <= n
  const int k_max = static_cast<int>(std::floor(static_cast<double>(n) * mu));
  const double log_mu = std::log(mu);
  const double log_1m = std::log1p(-mu);
  const double lg_n1 = std::lgamma(static_cast<double>(n) + 1.0);
  double total = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const double log_pmf = lg_n1 - std::lgamma(static_cast<double>(k) + 1.0) -
                           std::lgamma(static_cast<double>(n - k) + 1.0) +
                           static_cast<double>(k) * log_mu +
                           static_cast<double>(n - k) * log_1m;
    total += std::exp(log_pmf);
  }
  return std::min(total, 1.0);
}

double optimism_probability_exact(double mu, int n, int l) {
  if (n < 0 || n > 20)
    throw std::invalid_argument("optimism_probability_exact: need 0 <= n <= 20");
  if (l < 1) throw std::invalid_argument("optimism_probability_exact: l must be >= 1");
  if (!(mu >= 0.0) || !(mu <= 1.0))
    throw std::invalid_argument("optimism_probability_exact: mu must lie in [0, 1]");

  // Round-robin membership masks and batch sizes.
  std::vector<std::uint32_t> batch_mask(static_cast<std::size_t>(l), 0);
  std::vector<int> batch_size(static_cast<std::size_t>(l), 0);
  for (int i = 0; i < n; ++i) {
    batch_mask[static_cast<std::size_t>(i % l)] |= (1u << i);
    batch_size[static_cast<std::size_t>(i % l)] += 1;
  }

  // pow tables avoid 2^n pow() calls.
  std::vector<double> pow_mu(static_cast<std::size_t>(n) + 1, 1.0);
  std::vector<double> pow_1m(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k <= n; ++k) {
    pow_mu[static_cast<std::size_t>(k)] = pow_mu[static_cast<std::size_t>(k - 1)] * mu;
    pow_1m[static_cast<std::size_t>(k)] = pow_1m[static_cast<std::size_t>(k - 1)] * (1.0 - mu);
  }

  double prob = 0.0;
  const std::uint32_t num_sequences = 1u << n;
  for (std::uint32_t seq = 0; seq < num_sequences; ++seq) {
    double estimate = std::numeric_limits<double>::infinity();
    for (int b = 0; b < l; ++b) {
      const int ones = std::popcount(seq & batch_mask[static_cast<std::size_t>(b)]);
      const double shrunk = static_cast<double>(ones) /
                            static_cast<double>(batch_size[static_cast<std::size_t>(b)] + 2);
      estimate = std::min(estimate, shrunk);
    }
    if (estimate <= mu) {
      const int ones = std::popcount(seq);
      prob += pow_mu[static_cast<std::size_t>(ones)] *
              pow_1m[static_cast<std::size_t>(n - ones)];
    }
  }
  return prob;
}

McEstimate optimism_probability_mc(double mu, std::int64_t n, int l,
                                   std::int64_t trials, std::uint64_t seed) {
  if (l < 1) throw std::invalid_argument("optimism_probability_mc: l must be >= 1");
  if (trials < 1) throw std::invalid_argument("optimism_probability_mc: trials must be >= 1");
  Rng rng(seed);
  std::vector<double> sums(static_cast<std::size_t>(l));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(l));
  std::int64_t hits = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto b = static_cast<std::size_t>(i % l);
      counts[b] += 1;
      if (rng.uniform() < mu) sums[b] += 1.0;
    }
    double estimate = std::numeric_limits<double>::infinity();
    for (int b = 0; b < l; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      estimate = std::min(estimate, sums[bi] / static_cast<double>(counts[bi] + 2));
    }
    if (estimate <= mu) ++hits;
  }
  const double p_hat = static_cast<double>(hits) / static_cast<double>(trials);
  return McEstimate{p_hat, binomial_std_error(p_hat, trials)};
}

double concentration_check(double mu, double sigma2, std::int64_t n, int l,
                           std::int64_t horizon, double delta,
                           std::int64_t trials, std::uint64_t seed) {
  if (l < 1) throw std::invalid_argument("concentration_check: l must be >= 1");
  if (trials < 1) throw std::invalid_argument("concentration_check: trials must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("concentration_check: delta must lie in (0, 1)");
  if (n > horizon)
    throw std::invalid_argument("concentration_check: n must be <= horizon");

  const double eff = static_cast<double>(n) / static_cast<double>(l) + 1.0;
  const double threshold =
      2.0 / eff * std::log(3.0 * static_cast<double>(horizon) / delta) +
      std::sqrt(sigma2 / eff * std::log(static_cast<double>(horizon) / delta));

  Rng rng(seed);
  std::vector<double> sums(static_cast<std::size_t>(l));
  std::vector<std::int64_t> counts(static_cast<std::size_t>(l));
  std::int64_t violations = 0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto b = static_cast<std::size_t>(i % l);
      counts[b] += 1;
      if (rng.uniform() < mu) sums[b] += 1.0;
    }
    double estimate = n == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    for (int b = 0; b < l && n > 0; ++b) {
      const auto bi = static_cast<std::size_t>(b);
      estimate = std::min(estimate, sums[bi] / static_cast<double>(counts[bi] + 2));
    }
    if (mu - estimate > threshold) ++violations;
  }
  return static_cast<double>(violations) / static_cast<double>(trials);
}

int berry_esseen_warmup(double sigma, double rho) {
  if (!(sigma > 0.0)) throw std::invalid_argument("berry_esseen_warmup: sigma must be > 0");
  if (!(rho >= 0.0)) throw std::invalid_argument("berry_esseen_warmup: rho must be >= 0");
  const double c = rho / (sigma * sigma * sigma);
  return std::max(1, static_cast<int>(std::ceil(4.0 * c * c)));
}

std::vector<VerificationReport> conjecture_scan(const Arm& arm,
                                                std::span<const std::int64_t> n_grid,
                                                std::int64_t trials,
                                                std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("conjecture_scan: trials must be >= 1");
  const double mean = arm.true_mean();
  std::vector<VerificationReport> reports;
  reports.reserve(n_grid.size());
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const std::int64_t n = n_grid[gi];
    Rng rng = Rng::stream(seed, 0x636f6e6aULL, static_cast<std::uint64_t>(gi));
    std::int64_t hits = 0;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
      double sum = 0.0;
      for (std::int64_t i = 0; i < n; ++i) sum += arm.sample(rng);
      if (sum <= static_cast<double>(n) * mean) ++hits;
    }
    const double p_hat = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = binomial_std_error(p_hat, trials);
    VerificationReport report;
    report.claim = "anticoncentration-conjecture";
    report.params = arm.describe() + ";n=" + std::to_string(n) +
                    ";trials=" + std::to_string(trials);
    report.value = p_hat;
    report.std_error = se;
    report.bound = 0.25;
    report.pass = p_hat >= 0.25 - 4.0 * se;
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace batchens
