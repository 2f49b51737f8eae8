#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sgcl {

using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

// Every stochastic component draws from its own stream:
//   seed(component) = splitmix64(root ^ fnv1a64(component))
// Nested components chain: derive_seed(derive_seed(root, "train"), "epoch/3").
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view component) noexcept {
    return detail::splitmix64(root ^ detail::fnv1a64(component));
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view component, std::uint64_t index) noexcept {
    return detail::splitmix64(derive_seed(root, component) + index);
}

inline Rng make_rng(std::uint64_t root, std::string_view component) { return Rng(derive_seed(root, component)); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

} // namespace sgcl
