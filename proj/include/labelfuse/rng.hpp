#pragma once

#include <cstdint>

namespace labelfuse {

// splitmix64 step; used for seeding and for deriving per-trial streams.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// xoshiro256++ with explicit helpers. std:: distributions are
// implementation-defined, which would break byte-identical output
// across toolchains, so all draws go through this class.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
        if (!(s_[0] | s_[1] | s_[2] | s_[3])) s_[0] = 0x1ull;
    }

    // Seed for the (seed, stream) substream; stable across platforms and
    // worker counts.
    static uint64_t derive_seed(uint64_t seed, uint64_t stream) {
        uint64_t sm = seed;
        uint64_t a = splitmix64(sm);
        sm = a ^ (stream + 0x632be59bd9b4e019ull) * 0x9e3779b97f4a7c15ull;
        return splitmix64(sm);
    }

    static Rng derive(uint64_t seed, uint64_t stream) { return Rng(derive_seed(seed, stream)); }

    uint64_t next() {
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound); bound >= 1. Lemire's method.
    uint64_t below(uint64_t bound) {
        unsigned __int128 m = (unsigned __int128)next() * bound;
        auto lo = (uint64_t)m;
        if (lo < bound) {
            uint64_t t = (0 - bound) % bound;
            while (lo < t) {
                m = (unsigned __int128)next() * bound;
                lo = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return (double)(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    uint64_t s_[4];
};

}  // namespace labelfuse
