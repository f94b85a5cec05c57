#pragma once

#include <cstdint>
#include <utility>

namespace spinbath {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for realization `realization` of sweep point `point` under
/// `master`. Points and realizations can be added without disturbing the
/// seeds of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t point,
                                    std::uint64_t realization) {
  std::uint64_t h = mix64(master ^ 0x5851f42d4c957f2dULL);
  h = mix64(h ^ (point * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (realization * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

/// Counter-based generator: draw n is mix64(key + n * golden_gamma), so the
/// stream is a pure function of (seed, counter) and identical on every
/// platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed + 0x2545f4914f6cdd1dULL)) {}

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Two independent standard normals via Box-Muller.
  std::pair<double, double> gaussian_pair();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace spinbath
