#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "cusboost/errors.hpp"

namespace cusboost {

// SplitMix64 (Steele, Lea & Vigna). One fixed, fully specified generator is
// used for every random decision in the library so that a 64-bit seed gives
// the same folds, samples and clusterings on every platform and build.
// Reference output from seed 0: 0xe220a8397b1dcdaf, ...
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n), unbiased (rejection on the wrap-around tail).
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw ConfigError("next_below: bound must be positive");
        std::uint64_t x, r;
        do {
            x = next_u64();
            r = x % n;
        } while (x - r > std::uint64_t(0) - n);
        return r;
    }

    // Fisher-Yates, iterating from the back.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// FNV-1a, used to fold names (dataset, stream tags) into seed derivations.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic sub-seed derivation: advance once from the base seed, then
// fold each token in with one SplitMix64 step. Order-sensitive, so
// derive_seed(s, {a, b}) != derive_seed(s, {b, a}) in general. Every consumer
// of randomness gets its own stream through this single function, which makes
// any cell of an experiment reproducible in isolation.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tokens) {
    SplitMix64 g(base);
    std::uint64_t s = g.next_u64();
    for (std::uint64_t t : tokens) {
        SplitMix64 h(s ^ t);
        s = h.next_u64();
    }
    return s;
}

// First m items of a seeded Fisher-Yates pass over `items`; the standard
// uniform without-replacement draw.
inline std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> items,
                                                           std::size_t m, SplitMix64& rng) {
    if (m > items.size()) throw ConfigError("sample_without_replacement: m exceeds population");
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng.next_below(items.size() - i));
        std::swap(items[i], items[j]);
    }
    items.resize(m);
    return items;
}

} // namespace cusboost
