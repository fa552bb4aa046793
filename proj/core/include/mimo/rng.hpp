#pragma once

#include <cstdint>
#include <random>

namespace mimo {

using Rng = std::mt19937_64;

// Stream tags keep independent draws of one experiment apart.
enum class Stream : std::uint32_t {
    layout = 1,
    directions = 2,
    large_scale = 3,
    small_scale = 4,
    shadowing = 5,
    jitter = 6,
    calibration = 7,
};

// Engine for (seed, stream, index). Same triple, same sequence, whatever thread runs it.
inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

// Child seed for per-item generators that take a plain seed (layouts, directions).
inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
    Rng r = make_rng(seed, stream, index);
    return r();
}

}  // namespace mimo
