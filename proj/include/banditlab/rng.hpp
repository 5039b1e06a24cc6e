#pragma once

// Deterministic random streams for reproducible simulations.
//
// The generator is xoshiro256++ seeded through splitmix64, implemented here
// so that a (seed, call sequence) pair produces the same draws on every
// platform. Nothing in this header touches std::random_device or the
// standard distributions, whose outputs differ between standard libraries.
//
// Stream discipline used by the experiment loop (one stream per run):
//   1. profile jitter draws, if enabled (four uniforms: tau, alpha, phi, beta)
//   2. per step: one Beta sample per arm in index order 0..K-1,
//      then the environment's randomness (Bernoulli pull or, at a pass
//      boundary, the dataset reshuffle).
// Rejection steps inside the Gamma sampler consume a variable number of
// underlying draws, but the count depends only on prior draws, so replaying
// a seed replays the trajectory exactly.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace banditlab {

namespace detail {

// splitmix64 output for state value z (Steele, Lea, Flood 2014).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Derives a well-separated child seed for run `index` from `base`.
// This is the index-th output of the splitmix64 sequence started at `base`,
// which is the standard way to spawn independent xoshiro seeds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return detail::splitmix64_mix(base + index * 0x9e3779b97f4a7c15ULL);
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {
    // Expand the 64-bit seed into the 256-bit xoshiro state via splitmix64.
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ULL;
      word = detail::splitmix64_mix(s);
    }
  }

  std::uint64_t seed() const { return seed_; }

  // xoshiro256++ step.
  std::uint64_t next_u64() {
    const std::uint64_t result = detail::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Gamma(shape, scale 1) via Marsaglia-Tsang squeeze rejection for
  // shape >= 1; shapes below 1 are boosted with the power-of-uniform
  // identity Gamma(a) = Gamma(a + 1) * U^(1/a).
  double gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
      throw std::invalid_argument("gamma: shape must be positive and finite, got " +
                                  std::to_string(shape));
    }
    double boost = 1.0;
    if (shape < 1.0) {
      boost = std::pow(uniform01(), 1.0 / shape);
      shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) {
        return clamp_positive(boost * d * v);
      }
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return clamp_positive(boost * d * v);
      }
    }
  }

  // Beta(a, b) as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
  // Valid for any positive real shapes, which the weighted posterior
  // updates produce routinely.
  double beta(double a, double b) {
    if (!(a > 0.0) || !std::isfinite(a) || !(b > 0.0) || !std::isfinite(b)) {
      throw std::invalid_argument("beta: shapes must be positive and finite");
    }
    const double x = gamma(a);
    const double y = gamma(b);
    double t = x / (x + y);
    // Guard the open-interval contract against extreme-shape underflow.
    if (!(t > 0.0)) t = std::numeric_limits<double>::min();
    if (!(t < 1.0)) t = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return t;
  }

 private:
  static double clamp_positive(double v) {
    return v > 0.0 ? v : std::numeric_limits<double>::min();
  }

  std::array<std::uint64_t, 4> state_;
  std::uint64_t seed_;
};

}  // namespace banditlab
