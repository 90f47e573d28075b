#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace figkd {

// Derives an independent stream seed from (seed, stream) with a SplitMix64
// scramble. Stream ids are small constants fixed at the call sites, so the
// same run seed yields decoupled init/shuffle/data streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seeded random source. The engine is std::mt19937_64, whose update rule and
// constants are pinned by the C++ standard; uniform doubles take the top 53
// bits and gaussians use Box-Muller, so every draw depends only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal; generates pairs, keeps one spare.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform index in [0, n); n > 0. Modulo bias is irrelevant at our n.
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  // In-place Fisher-Yates; avoids std::shuffle, whose draws are
  // implementation-defined.
  void shuffle(std::span<std::size_t> v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace figkd
