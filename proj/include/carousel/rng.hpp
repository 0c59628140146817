#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace carousel {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded generator with explicit samplers so that output streams depend only
// on the mt19937_64 engine, which is fully specified by the standard.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // Independent stream for Monte Carlo path `index` under a master seed.
  static Rng derive(uint64_t seed, uint64_t index) {
    return Rng(splitmix64(seed ^ splitmix64(index + 0x51ed2701)));
  }

  // Uniform on [0, 1).
  double uniform() {
    return (eng_() >> 11) * 0x1.0p-53;
  }

  double uniform_angle() { return 6.283185307179586476925286766559 * uniform(); }

  // Standard normal, Marsaglia polar method.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

  uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace carousel
