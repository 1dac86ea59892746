#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace debfab {

// splitmix64; used wherever a stable, implementation-independent mix is needed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline uint64_t stable_hash64(uint64_t key, uint64_t seed) {
    return splitmix64(key ^ splitmix64(seed));
}

// Bounded draw and shuffle are hand-rolled because std::uniform_int_distribution
// and std::shuffle produce library-dependent sequences; results must be
// reproducible from the seed alone.
inline uint64_t bounded(std::mt19937_64& rng, uint64_t n) {
    return rng() % n;
}

template <class T>
void deterministic_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(bounded(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace debfab
