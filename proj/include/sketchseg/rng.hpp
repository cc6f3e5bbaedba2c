#pragma once

#include <cmath>
#include <cstdint>

namespace sketchseg {

/// Small deterministic generator (splitmix64). Standard-library distribution
/// objects are implementation-defined, so sampling is done by hand here to
/// keep outputs bit-identical across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform real in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Uniform integer in [lo, hi] inclusive.
  int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next() % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; one fresh pair of draws per call.
  double gaussian(double mean, double sigma) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * mag * std::cos(6.283185307179586477 * u2);
  }

 private:
  uint64_t state_;
};

/// Stable per-item seed so item `index` of a batch reproduces on its own.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
  Rng mixer(seed ^ (0xD1B54A32D192ED03ull * (index + 1)));
  return mixer.next();
}

}  // namespace sketchseg
