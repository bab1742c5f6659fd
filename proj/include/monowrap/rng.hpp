#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace monowrap {

// All randomness flows through explicitly owned 64-bit Mersenne Twister
// streams. The draw helpers below avoid the standard distributions because
// their output is implementation-defined; these are bit-reproducible
// everywhere mt19937_64 is.
using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// floor(u * n) for one uniform01 draw u; n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  return i < n ? i : n - 1;
}

// Independent stream derived from a root seed and a path of integers, e.g.
// (seed, {trial, purpose}). Seeding goes through std::seed_seq, whose output
// is fully specified by the standard.
Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

}  // namespace monowrap
