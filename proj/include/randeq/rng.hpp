// rng.hpp -- counter-based deterministic random numbers.
//
// SplitMix64 evaluated in counter mode: the i-th draw of a stream is
//   mix(seed + (i+1) * 0x9E3779B97F4A7C15)
// which is exactly the SplitMix64 sequence for that seed, but addressable
// by index. Every draw is a pure function of (seed, index), so results are
// identical across platforms and independent of evaluation order.

#pragma once

#include <cstdint>

namespace randeq {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// i-th 64-bit draw of the stream identified by seed.
inline std::uint64_t rng_u64(std::uint64_t seed, std::uint64_t index) {
    return splitmix64_mix(seed + (index + 1) * kSplitMixGamma);
}

// Uniform double in [0,1) with 53 random bits.
inline double rng_uniform01(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(rng_u64(seed, index) >> 11) * 0x1.0p-53;
}

// Derive an independent substream seed (e.g. per Monte-Carlo block).
inline std::uint64_t rng_substream(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64_mix(seed ^ (tag * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
}

} // namespace randeq
