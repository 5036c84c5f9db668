#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace batchens {

// Seeded, splittable pseudo-random stream (xoshiro256++ core, splitmix64
// seeding). Every stochastic component of the library draws from its own
// Rng instance so results do not depend on execution order or thread count.
// All variate transforms are implemented here from raw 64-bit draws; the
// standard <random> distributions are implementation-defined and would break
// the reproducibility contract.
class Rng {
 public:
  Rng() : Rng(0) {}

  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  // Derives an independent stream from (seed, a, b), e.g. (episode seed,
  // stream tag, arm index). Streams with distinct tuples are decorrelated
  // by the splitmix64 avalanche.
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t x = seed;
    std::uint64_t h = splitmix64(x);
    x ^= a * 0x9e3779b97f4a7c15ULL;
    h ^= splitmix64(x);
    x ^= b * 0xbf58476d1ce4e5b9ULL;
    h ^= splitmix64(x);
    return Rng(h);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Unbiased integer in [0, n), rejection sampling.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      const auto wide = static_cast<unsigned __int128>(r) * n;
      if (static_cast<std::uint64_t>(wide) >= threshold)
        return static_cast<std::uint64_t>(wide >> 64);
    }
  }

  // Standard normal via Box-Muller; consumes two uniforms, caches the spare.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Exponential with the given rate (mean 1/rate).
  double exponential(double rate) {
    const double u = uniform();
    return -std::log1p(-u) / rate;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace batchens
