#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace slipkit {

// SplitMix64 step function (Steele/Lea/Vigna). Integer state transitions
// only, so the sequence for a given seed is identical on every platform.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
};

// Derives an independent substream seed, used to give every simulator step
// its own generator so emitted noise depends only on (seed, step index).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 s(seed ^ (0xA0761D6478BD642Full * (stream + 1)));
  s.next();
  return s.next();
}

// Seeded generator with explicitly pinned algorithms for every distribution
// the toolkit draws from: 53-bit uniforms, rejection-sampled bounded
// integers, Box-Muller normals and a Fisher-Yates shuffle. The standard
// library distributions are not used because their output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_.next(); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n); n must be nonzero.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = gen_.next();
      if (x >= threshold) return x % n;
    }
  }

  // Standard normal via Box-Muller; the second deviate of each pair is kept
  // for the next call.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double gaussian(double mean, double sigma) { return mean + sigma * gaussian(); }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  SplitMix64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace slipkit
