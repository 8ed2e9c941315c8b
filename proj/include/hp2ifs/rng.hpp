#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace hp2ifs {

/// Uniform integer in [0, n) by rejection on mt19937_64 output. Unlike
/// std::uniform_int_distribution the sequence is identical on every platform.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Fisher-Yates with uniform_below.
template <typename T>
void portable_shuffle(std::vector<T>& v, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = uniform_below(rng, i);
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace hp2ifs
