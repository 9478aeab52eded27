#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace ohmnet {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a root seed and a path of
/// integers (e.g. {tag, layer, node}). Same inputs always give the same seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(root);
    for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t root, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(root, path));
}

// Library-defined draws so that sequences do not depend on the standard
// library's distribution implementations.

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) noexcept {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) noexcept {
    // Lemire's nearly-divisionless method.
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = -n % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
    const auto n = last - first;
    for (auto i = n - 1; i > 0; --i) {
        const auto j = static_cast<decltype(i)>(uniform_below(rng, static_cast<std::uint64_t>(i) + 1));
        using std::swap;
        swap(first[i], first[j]);
    }
}

namespace stream {
// Tags that separate the sub-streams derived from a single --seed.
inline constexpr std::uint64_t walks = 1;
inline constexpr std::uint64_t walk_order = 2;
inline constexpr std::uint64_t init = 3;
inline constexpr std::uint64_t train = 4;
inline constexpr std::uint64_t folds = 5;
inline constexpr std::uint64_t classifier = 6;
inline constexpr std::uint64_t synth = 7;
} // namespace stream

} // namespace ohmnet
