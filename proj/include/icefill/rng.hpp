#ifndef ICEFILL_RNG_HPP
#define ICEFILL_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

#include "icefill/types.hpp"

// Self-contained random number generation. std::mt19937 would do, but the
// standard leaves distribution implementations (normal_distribution in
// particular) unspecified, so seeded runs would not reproduce across
// standard libraries. We pin the whole chain: xoshiro256++ for bits,
// a fixed uniform mapping, and Box-Muller for Gaussians.
namespace icefill {

/// SplitMix64 step; used to expand seeds and to derive substream seeds.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// xoshiro256++ PRNG (Blackman & Vigna), seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  [[nodiscard]] std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  [[nodiscard]] double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  [[nodiscard]] double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Standard real Gaussian via Box-Muller (pairs cached).
  [[nodiscard]] double gaussian() noexcept {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u in (0,1] so the log is finite.
    const double u = 1.0 - uniform();
    const double v = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * kPi * v;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Circularly-symmetric complex Gaussian, unit variance: (N + jN)/sqrt(2).
  [[nodiscard]] cxd cgaussian() noexcept {
    const double re = gaussian();
    const double im = gaussian();
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

 private:
  static constexpr double kPi = 3.141592653589793238462643383279502884;
  static constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

  [[nodiscard]] static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Seed for a named auxiliary stream (kernel caching, noise, ...) that must
/// not collide with the per-trial streams seed+0, seed+1, ....
[[nodiscard]] constexpr std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                                         std::uint64_t tag) noexcept {
  std::uint64_t sm = base_seed ^ (0x517cc1b727220a95ull * (tag + 1));
  return splitmix64(sm);
}

}  // namespace icefill

#endif
