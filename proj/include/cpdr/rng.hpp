#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace cpdr {

// SplitMix64 step: advances the state and returns a well-mixed 64-bit value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives an independent generator seed from (base seed, cell key, replication
// index). The cell key deliberately excludes the estimation method, so every
// method sees the same data realization for a given cell and replication.
inline std::uint64_t derive_stream(std::uint64_t base_seed, std::string_view cell_key,
                                   std::uint64_t rep_index) {
  std::uint64_t s = base_seed;
  std::uint64_t a = splitmix64(s);
  s = a ^ fnv1a64(cell_key);
  std::uint64_t b = splitmix64(s);
  s = b ^ (rep_index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(s);
}

// Deterministic sampler: explicit transforms over mt19937_64 so that a given
// seed reproduces the same stream on every standards-conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on the open interval (0,1); never returns 0 or 1, safe for log().
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method (pair-cached).
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

  // Chi-squared with integer df: sum of df squared standard normals.
  double chisq(int df) {
    double acc = 0.0;
    for (int i = 0; i < df; ++i) {
      const double z = normal();
      acc += z * z;
    }
    return acc;
  }

  // Centered standard exponential: exp(1) - 1 (mean zero).
  double exp_centered() { return -std::log(uniform01()) - 1.0; }

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cpdr
