#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "batchens/environments.hpp"

namespace batchens {

// Outcome of one verification claim at one parameter point. Exact
// computations carry zero standard error.
struct VerificationReport {
  std::string claim;
  std::string params;
  double value = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

std::string verification_csv_header();
std::string verification_csv_row(const VerificationReport& report);

// Pr(Bin(n, mu) <= floor(n * mu)), exact, log-space pmf accumulation.
// Stable up to n in the hundreds.
double binomial_anticoncentration(int n, double mu);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Pr(batch-min estimate <= mu) for a Bernoulli(mu) arm with n samples split
// round-robin into l batches, by exact enumeration of all 2^n loss
// sequences. The estimator arithmetic is implemented inline here so this
// stays an independent oracle for the library's estimator. Throws
// std::invalid_argument for n > 20.
double optimism_probability_exact(double mu, int n, int l);

// Same probability by Monte Carlo with a binomial standard error.
McEstimate optimism_probability_mc(double mu, std::int64_t n, int l,
                                   std::int64_t trials, std::uint64_t seed);

// Empirical rate of mu - estimate > 2/((n/l)+1) * ln(3T/delta)
//                               + sqrt(sigma2/((n/l)+1) * ln(T/delta))
// for a Bernoulli(mu) arm; the concentration guarantee bounds the union over
// n in [T] by delta, so each single-n rate must come out well below delta.
double concentration_check(double mu, double sigma2, std::int64_t n, int l,
                           std::int64_t horizon, double delta,
                           std::int64_t trials, std::uint64_t seed);

// Samples per batch that guarantee the CLT anti-concentration level via the
// Berry-Esseen bound: max(1, ceil(4 * (rho / sigma^3)^2)). rho is the third
// absolute central moment.
int berry_esseen_warmup(double sigma, double rho);

// Monte-Carlo scan of Pr(sum of n draws <= n * mean) across n_grid. Points
// below 1/4 - 4 SE are flagged (pass = false) as evidence against the
// bounded-arm anti-concentration conjecture; callers decide whether that
// blocks anything.
std::vector<VerificationReport> conjecture_scan(const Arm& arm,
                                                std::span<const std::int64_t> n_grid,
                                                std::int64_t trials,
                                                std::uint64_t seed);

}  // namespace batchens
