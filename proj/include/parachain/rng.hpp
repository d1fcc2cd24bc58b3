#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace parachain {

// Reproducible random streams.
//
// Generator: xoshiro256++ (Blackman & Vigna). The 256-bit state for a given
// (seed, stream) pair is filled with four consecutive SplitMix64 outputs
// started from  key = splitmix64_mix(seed) ^ splitmix64_mix(stream ^ kStreamSalt).
//
// Uniforms on [0, 1) take the top 53 bits: (next() >> 11) * 2^-53.
// Standard normals use the Marsaglia polar method on uniforms mapped to
// (-1, 1); the second variate of each accepted pair is cached and returned by
// the next call. Sequences are bit-identical wherever double is IEEE-754
// binary64 and the C library's log() rounds the same way (sqrt is
// correctly rounded everywhere).

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
inline constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

// SplitMix64 finalizer applied to x + golden gamma.
constexpr std::uint64_t splitmix64_mix(std::uint64_t x) noexcept {
  std::uint64_t z = x + kGoldenGamma;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream id for replication j, chain k:
//   mix64(j, k) = splitmix64_mix(splitmix64_mix(j) ^ k).
// Injective in k for fixed j, and order-independent.
constexpr std::uint64_t mix64(std::uint64_t replication, std::uint64_t chain) noexcept {
  return splitmix64_mix(splitmix64_mix(replication) ^ chain);
}

struct RngState {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const RngState&, const RngState&) = default;
};

inline RngState chain_stream(std::uint64_t base_seed, std::uint64_t replication,
                             std::uint64_t chain) noexcept {
  return {base_seed, mix64(replication, chain)};
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(RngState st) noexcept {
    std::uint64_t x = splitmix64_mix(st.seed) ^ splitmix64_mix(st.stream ^ kStreamSalt);
    for (auto& w : s_) {
      w = splitmix64_mix(x);
      x += kGoldenGamma;
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // [0, 1)
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double standard_normal() noexcept {
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
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline double standard_normal(Rng& rng) noexcept { return rng.standard_normal(); }

}  // namespace parachain
