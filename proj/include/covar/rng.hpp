#pragma once

#include <cstdint>
#include <random>

namespace covar {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive decorrelated stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed of stream `index` under `master`. Streams depend only on (master, index),
/// so serial and parallel runs draw identical numbers.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
    return Rng(stream_seed(master, index));
}

/// Uniform draw on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
    // 53-bit mantissa; shift by half a step to exclude both endpoints.
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace covar
