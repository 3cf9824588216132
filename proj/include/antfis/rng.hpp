#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace antfis {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives a reproducible sub-seed from a master seed and a sequence of
/// counters. Distinct counter tuples give statistically independent streams,
/// so work items can draw in any order or on any thread.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> counters) noexcept
{
    std::uint64_t h = mix64(seed);
    for (auto c : counters) {
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> counters)
{
    return Rng{derive_seed(seed, counters)};
}

} // namespace antfis
