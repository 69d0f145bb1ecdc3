#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace stepgrid {

/// Deterministic 64-bit generator (splitmix64). All randomness in the project
/// flows through this type so that results are bit-identical across platforms;
/// the standard <random> distributions are implementation-defined and are not
/// used anywhere.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 bits of precision.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n).
  uint64_t below(uint64_t n) { return next_u64() % n; }

  /// Uniform integer in [lo, hi] inclusive.
  int64_t range(int64_t lo, int64_t hi) {
    return lo + int64_t(below(uint64_t(hi - lo + 1)));
  }

  /// Standard normal via Box-Muller; one value per call, pair cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    // u1 == 0 would take log(0); nudge to the smallest representable draw.
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    double mag = std::sqrt(-2.0 * std::log(u1));
    double ang = 2.0 * M_PI * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

  bool coin() { return (next_u64() & 1ull) != 0; }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline uint64_t hash_mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

inline uint64_t hash_mix(uint64_t h, std::string_view s) {
  uint64_t fnv = 0xcbf29ce484222325ull;
  for (unsigned char c : s) fnv = (fnv ^ c) * 0x100000001b3ull;
  return hash_mix(h, fnv);
}

/// Derives an independent child stream from a root seed and a tag path,
/// e.g. derive_seed(seed, "fold", repeat, cls).
template <typename... Parts>
uint64_t derive_seed(uint64_t root, Parts... parts) {
  uint64_t h = root;
  ((h = hash_mix(h, parts)), ...);
  // one splitmix step to decorrelate nearby tags
  return Rng(h).next_u64();
}

/// Fisher-Yates shuffle driven by the project Rng.
template <typename Vec>
void shuffle(Vec& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = size_t(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace stepgrid
