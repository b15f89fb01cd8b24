#pragma once

#include <cstdint>
#include <limits>

#include "certdel/common.hpp"

namespace certdel {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

// Derives a child seed from (seed, index). Used for per-trial streams so
// experiments are reproducible under any worker count.
inline std::uint64_t stable_hash(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    std::uint64_t h = detail::splitmix64(s);
    s ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    h ^= detail::splitmix64(s);
    std::uint64_t t = h;
    return detail::splitmix64(t);
}

// Deterministic, platform-stable PRNG (xoshiro256** seeded via splitmix64).
// Identical seeds give identical streams on every platform; none of the
// distribution helpers go through std::<random> distributions, whose output
// is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = detail::splitmix64(s);
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in the open interval (0, hi).
    double uniform_open(double hi) {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u * hi;
    }

    int bit() { return static_cast<int>(next_u64() >> 63); }

    // Unbiased integer in [0, bound). Lemire's multiply-then-reject.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw DomainError("Rng::below: bound must be positive");
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (lo < threshold) {
                m = static_cast<unsigned __int128>(next_u64()) * bound;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Independent stream for trial `index`, derived from the construction
    // seed only; safe to create from any point of the parent's lifetime.
    Rng child(std::uint64_t index) const { return Rng(stable_hash(seed_, index)); }

private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
};

} // namespace certdel
