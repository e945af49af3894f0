#pragma once

#include <cstdint>
#include <random>

namespace tct {

/// SplitMix64 finalizer; used to spread seeds and derive worker sub-streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for worker `worker` in trial `trial` of an experiment rooted at
/// `seed_base`. Adding workers or trials never perturbs other streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed_base, std::uint64_t trial,
                                    std::uint64_t worker) {
  return splitmix64(splitmix64(seed_base ^ splitmix64(trial + 1)) ^
                    splitmix64((worker + 1) * 0x9e3779b97f4a7c15ULL));
}

/// Deterministic RNG. The engine is std::mt19937_64 (bit-exact by the
/// standard); bounded and real draws are implemented here instead of using
/// std::uniform_*_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint32_t below(std::uint32_t n) {
    // rejection sampling on the top 32 bits keeps the draw unbiased
    const std::uint64_t limit = (0x100000000ULL / n) * n;
    for (;;) {
      std::uint64_t x = eng_() >> 32;
      if (x < limit) return static_cast<std::uint32_t>(x % n);
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint32_t>(hi - lo + 1)));
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tct
