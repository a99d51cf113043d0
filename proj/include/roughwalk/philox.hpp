#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
//
// Every random number is a pure function of (seed, stream, index), so
// independent workers draw from non-overlapping streams with no shared state.
// A block of four 32-bit words yields two 52-bit uniforms; uniform number i of
// a stream comes from block i/2, words (2·(i%2), 2·(i%2)+1).

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace roughwalk {

using PhiloxBlock = std::array<std::uint32_t, 4>;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53U;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57U;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9U;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85U;

constexpr PhiloxBlock philox4x32_10(PhiloxBlock ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

/// Identifies one random stream. The top byte of `stream` is a domain tag so
/// that walk uniforms and Gaussian increments never share a stream.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

inline constexpr std::uint64_t kWalkDomain = 0;
inline constexpr std::uint64_t kGaussianDomain = std::uint64_t{1} << 56;

constexpr StreamKey walk_stream(std::uint64_t seed, std::uint64_t trajectory_id) {
  return {seed, kWalkDomain | (trajectory_id & 0x00FFFFFFFFFFFFFFULL)};
}

constexpr StreamKey gaussian_stream(std::uint64_t seed, std::uint64_t path_id) {
  return {seed, kGaussianDomain | (path_id & 0x00FFFFFFFFFFFFFFULL)};
}

constexpr PhiloxBlock stream_block(const StreamKey& key, std::uint64_t block) {
  return philox4x32_10({static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                        static_cast<std::uint32_t>(key.stream),
                        static_cast<std::uint32_t>(key.stream >> 32)},
                       {static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)});
}

/// Maps 64 random bits to [0,1) using the top 52 bits; exact, no rounding.
inline double bits_to_unit(std::uint64_t bits) {
  return std::bit_cast<double>(0x3FF0000000000000ULL | (bits >> 12)) - 1.0;
}

inline double block_uniform(const PhiloxBlock& b, unsigned half) {
  const std::uint64_t bits = std::uint64_t{b[2 * half]} | (std::uint64_t{b[2 * half + 1]} << 32);
  return bits_to_unit(bits);
}

/// Sequential reader over one stream, caching the current block.
class UniformStream {
 public:
  explicit UniformStream(StreamKey key, std::uint64_t first_index = 0)
      : key_(key), index_(first_index) {}

  double next() {
    const std::uint64_t block = index_ >> 1;
    if (!cached_ || block != cached_block_) {
      block_ = stream_block(key_, block);
      cached_block_ = block;
      cached_ = true;
    }
    return block_uniform(block_, static_cast<unsigned>(index_++ & 1U));
  }

  std::uint64_t position() const { return index_; }

 private:
  StreamKey key_;
  std::uint64_t index_;
  PhiloxBlock block_{};
  std::uint64_t cached_block_ = 0;
  bool cached_ = false;
};

/// Standard normal pairs by Box–Muller on consecutive uniforms.
class GaussianStream {
 public:
  explicit GaussianStream(StreamKey key) : uniforms_(key) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniforms_.next();  // (0,1]
    const double u2 = uniforms_.next();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  UniformStream uniforms_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace roughwalk
