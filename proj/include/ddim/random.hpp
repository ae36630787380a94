#pragma once

// Portable random streams. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; doubles are drawn as (x >> 11) * 2^-53
// so no library-specific distribution is involved. Sub-streams (per family
// member, per restart, per Monte Carlo block) are seeded by splitmix64.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace ddim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream'th sub-stream of seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform on {0, ..., n-1}; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform in the closed unit ball of dimension v.size(), by rejection
  /// from the cube.
  template <typename Vec>
  void unit_ball(Vec& v) {
    for (;;) {
      double r2 = 0.0;
      for (Eigen::Index k = 0; k < v.size(); ++k) {
        v[k] = uniform(-1.0, 1.0);
        r2 += v[k] * v[k];
      }
      if (r2 <= 1.0) return;
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ddim
