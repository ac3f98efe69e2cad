// random.hpp - deterministic random streams.
//
// Every consumer owns its own engine. Streams for one run are derived from a
// single 64-bit seed plus a stream tag through std::seed_seq, whose mixing
// algorithm is fixed by the standard, so sequences are reproducible across
// standard library implementations. Uniform and exponential variates are
// generated here rather than through <random> distributions, whose algorithms
// are implementation-defined.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bdrelay {

using Rng = std::mt19937_64;

enum class StreamTag : std::uint32_t {
    Fading = 1,
    TieBreak = 2,
    MonteCarlo = 3,
};

inline Rng make_stream(std::uint64_t seed, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return Rng(seq);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Exponential with the given mean, by inversion. 1 - u is in (0, 1].
inline double exponential(Rng& rng, double mean) {
    return -mean * std::log1p(-uniform01(rng));
}

// Uniform index in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    return k < n ? k : n - 1;
}

}  // namespace bdrelay
