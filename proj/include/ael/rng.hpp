// Seed derivation for reproducible, scheduling-independent Monte Carlo.
//
// A run has one root seed. Every independent stream (a replicate, a
// bootstrap draw, a plan cell) gets its own seed by hashing the parent seed
// with a counter, so results never depend on evaluation order or thread count.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ael {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of child stream `index` under `parent`.
inline constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
    return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Seed reached by following a path of counters from `root`.
inline constexpr std::uint64_t derive_seed(std::uint64_t root,
                                           std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t s = root;
    for (auto i : path) s = derive_seed(s, i);
    return s;
}

using Engine = std::mt19937_64;

}  // namespace ael
