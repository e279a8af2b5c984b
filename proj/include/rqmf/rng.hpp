#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace rqmf {

using Index = std::size_t;

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed for trial `index` of a run started from `base_seed`:
///   splitmix64(base_seed ^ splitmix64(index))
/// Any implementation reproducing this function reproduces the per-trial streams.
constexpr std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return splitmix64(base_seed ^ splitmix64(index));
}

/// Deterministic generator. The engine is mt19937_64 (its output sequence is fixed by
/// the standard); the uniform helpers below are implemented here rather than through
/// <random> distributions so draws are identical across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Reject the lowest (2^64 mod n) words; the remaining range is a multiple of n.
    const std::uint64_t reject_below = (0 - n) % n;
    std::uint64_t x = engine_();
    while (x < reject_below) x = engine_();
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_real() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  bool bernoulli(double p) { return uniform_real() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rqmf
