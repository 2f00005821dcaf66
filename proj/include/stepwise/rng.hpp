#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace stepwise {

// SplitMix64 scrambler: turns a user seed into a well-mixed engine seed so
// that nearby seeds (0, 1, 2, ...) give unrelated streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic random source. All draws are implemented manually on top of
// the raw 64-bit output so results are identical across standard libraries
// (std::uniform_real_distribution and friends are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return std::ldexp(static_cast<double>(engine_() >> 11), -53);
  }

  // Index draw from a normalized probability vector via cumulative scan.
  int categorical(const std::vector<double>& probs) {
    const double u = uniform();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;  // guard against rounding
  }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stepwise
