#pragma once

#include <cstdint>
#include <random>

namespace omtest {

using Rng = std::mt19937_64;

// Uniform double in [0,1) using the top 53 bits of one engine draw.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stable per-trial seed derivation: independent streams for the same base
// seed and distinct indices, reproducible across runs and platforms.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

}  // namespace omtest
