#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace icregion {

// splitmix64 step; used to derive decorrelated substream seeds so that every
// sampled quantity depends only on (seed, tag...) and not on evaluation order.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return mix64(mix64(seed) ^ mix64(tag + 0x51ed2701ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag_a, std::uint64_t tag_b) {
    return derive_seed(derive_seed(seed, tag_a), tag_b);
}

// Dirichlet(1,...,1) draw: a uniform sample from the probability simplex.
inline std::vector<double> sample_simplex(std::mt19937_64& gen, std::size_t n) {
    std::exponential_distribution<double> exp1(1.0);
    std::vector<double> p(n);
    double total = 0.0;
    for (auto& v : p) {
        v = exp1(gen);
        total += v;
    }
    for (auto& v : p) v /= total;
    return p;
}

}  // namespace icregion
