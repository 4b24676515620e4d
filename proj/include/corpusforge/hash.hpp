#pragma once

#include <cstdint>
#include <string_view>

namespace corpusforge {

// 64-bit FNV-1a. Used everywhere a stable, platform-independent string hash
// is needed (feature hashing, fingerprints, id synthesis). Never use
// std::hash for anything that ends up in an output artifact.
inline uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL) {
    uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// splitmix64 finalizer; good avalanche, cheap, deterministic.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// Seeded hash of an already-hashed value; the basis of every MinHash
// permutation and the allocator's per-index Bernoulli draw.
inline uint64_t seeded_hash(uint64_t value, uint64_t seed) {
    return splitmix64(value ^ splitmix64(seed));
}

// Minimal deterministic PRNG for test data generation and anywhere we must
// not depend on the standard library's unspecified distributions.
class SplitMixRng {
public:
    explicit SplitMixRng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64(state_);
    }

    // Uniform in [0, n) by rejection-free multiply-shift; slight bias is
    // irrelevant at the n we use (n << 2^64).
    uint64_t next_below(uint64_t n) {
        return n ? static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64) : 0;
    }

    double next_double() {  // [0,1)
        return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
    }

private:
    uint64_t state_;
};

}  // namespace corpusforge
