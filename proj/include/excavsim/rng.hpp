#pragma once

#include <cstdint>
#include <random>

namespace excavsim {

/// Seedable random stream. Uniform draws come straight from the 64-bit engine
/// output so they lie in [0, 1) on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream derived from a trial seed and a stream index.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x5eedu};
    return Rng(std::mt19937_64(seq));
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean, double stddev) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  explicit Rng(std::mt19937_64 engine) : engine_(engine) {}

  std::mt19937_64 engine_;
};

}  // namespace excavsim
