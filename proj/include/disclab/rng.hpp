#pragma once

// Seeded, splittable randomness.
//
// Every random object in the toolkit (a vertex's edge choices, an edge's row,
// a trial of an experiment) draws from its own stream. A stream's seed is
// derive_seed(master_seed, index), so output never depends on the order in
// which objects are visited, and parallel generation reproduces the
// sequential result bit for bit.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions are written out here because the standard
// library's distributions are implementation-defined.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace disclab {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                    std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index + 0x632be59bd9b4e019ULL));
}

constexpr std::uint64_t derive_seed(
    std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept {
  for (auto i : path) seed = derive_seed(seed, i);
  return seed;
}

/// One independent stream of random numbers.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return engine_(); }

  /// Uniform integer in [0, bound), bound > 0. Unbiased (rejection).
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t u;
    do {
      u = engine_();
    } while (u >= limit);
    return u % bound;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Standard normal (Marsaglia polar method).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// A master seed plus the rule that turns it into per-object streams.
struct RandomSource {
  std::uint64_t master_seed = 0;

  Stream stream(std::uint64_t index) const {
    return Stream(derive_seed(master_seed, index));
  }
  RandomSource derive(std::uint64_t index) const {
    return RandomSource{derive_seed(master_seed, index)};
  }
};

}  // namespace disclab
