#pragma once

#include <cstdint>
#include <initializer_list>

namespace abmcalib {

// splitmix64 step; used for seed derivation and generator seeding.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives a child seed from a parent seed and a list of stream ids.
/// All randomness in the library is keyed this way so that results never
/// depend on execution order or thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = mix64(parent ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t id : ids) {
        h = mix64(h ^ mix64(id));
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t id) {
    return derive_seed(parent, {id});
}

/// xoshiro256** generator. The standard library's distributions are not
/// bit-reproducible across implementations, so the library rolls its own
/// generator plus the few draw helpers it needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x = mix64(x);
            word = x;
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n). Lemire's unbiased bounded draw.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller; one value per call, pair cached.
    double normal();

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace abmcalib
