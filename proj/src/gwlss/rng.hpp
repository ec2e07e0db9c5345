#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
// A draw is a pure function of (key, counter), so any entry of any replica
// can be generated independently of evaluation order or thread schedule.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gwlss::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter ctr, Key key) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline Key key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// Streams partition the counter space so unrelated consumers of one seed
// never share draws.
enum class Stream : std::uint32_t {
  MatrixEntry = 0,
  ProfileNoise = 1,
  Synthetic = 2,
};

/// Four 32-bit words addressed by (stream, replica, index, draw).
inline Counter block(Key key, Stream stream, std::uint32_t replica, std::uint64_t index,
                     std::uint32_t draw) {
  const Counter ctr = {(static_cast<std::uint32_t>(stream) << 24) ^ draw,
                       static_cast<std::uint32_t>(index),
                       static_cast<std::uint32_t>(index >> 32), replica};
  return philox4x32_10(ctr, key);
}

/// Uniform double on (0, 1), 53 bits, never exactly 0 or 1.
inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

struct UniformPair {
  double u0;
  double u1;
};

inline UniformPair uniforms(const Counter& words) {
  return {to_unit(words[0], words[1]), to_unit(words[2], words[3])};
}

/// Box-Muller on one block: one standard normal.
inline double standard_normal(const Counter& words) {
  const auto [u0, u1] = uniforms(words);
  return std::sqrt(-2.0 * std::log(u0)) * std::cos(2.0 * std::numbers::pi * u1);
}

// SplitMix64 finalizer, used to mix seeds with small integers.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace gwlss::rng
