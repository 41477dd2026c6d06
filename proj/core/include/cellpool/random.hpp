#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>

namespace cellpool {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The output is a pure function of (key, counter), so any (seed, substream)
/// pair maps to an independent stream regardless of evaluation order. The
/// class also satisfies UniformRandomBitGenerator for use with <random>.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ == 4) {
      buffer_ = block(block_index_++);
      lane_ = 0;
    }
    return buffer_[lane_++];
  }

  /// Random access: the block at position `index` of this stream.
  Block block(std::uint64_t index) const noexcept {
    Block ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
              static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    return generate(ctr, key_);
  }

  static Block generate(Block ctr, std::array<std::uint32_t, 2> key) noexcept {
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kM0} * c0;
      const std::uint64_t p1 = std::uint64_t{kM1} * c2;
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      c0 = hi1 ^ c1 ^ k0;
      c1 = static_cast<std::uint32_t>(p1);
      c2 = hi0 ^ c3 ^ k1;
      c3 = static_cast<std::uint32_t>(p0);
      k0 += kW0;
      k1 += kW1;
    }
    return {c0, c1, c2, c3};
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57;
  static constexpr std::uint32_t kW0 = 0x9E3779B9;
  static constexpr std::uint32_t kW1 = 0xBB67AE85;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Block buffer_{};
  int lane_ = 4;
};

/// SplitMix64 finalizer; used to fold structured indices into a stream id.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_id(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x243F6A8885A308D3ull;
  for (auto p : parts) h = mix64(h ^ mix64(p));
  return h;
}

/// Uniform in (0, 1) from two 32-bit words: 52 random bits plus a half,
/// which is exact in double, so neither endpoint is ever produced.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = ((std::uint64_t{hi} << 20) ^ (lo >> 12)) & ((1ull << 52) - 1);
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

template <class Gen>
double uniform_open(Gen& gen) noexcept {
  const auto hi = static_cast<std::uint32_t>(gen());
  const auto lo = static_cast<std::uint32_t>(gen());
  return to_open_unit(hi, lo);
}

/// Unit-mean exponential variate.
template <class Gen>
double exponential(Gen& gen) noexcept {
  return -std::log(uniform_open(gen));
}

/// One standard normal variate per call (Box-Muller, cosine branch only).
template <class Gen>
double standard_normal(Gen& gen) noexcept {
  const double u1 = uniform_open(gen);
  const double u2 = uniform_open(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace cellpool
