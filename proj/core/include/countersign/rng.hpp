#pragma once

#include <cstdint>

namespace csign {

// Deterministic PRNG for fuzzing and experiment harnesses. xoshiro256**
// seeded via splitmix64. Not used by the crypto targets; those carry their
// own primitive suite. std::uniform_int_distribution is implementation
// defined, so bounded draws are done here to keep corpora byte-identical
// across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            word = splitmix64(x);
        }
    }

    std::uint64_t next() {
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

    // Uniform in [0, bound), bound >= 1. Lemire multiply-shift with rejection.
    std::uint64_t bounded(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform double in [0, 1).
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    std::uint8_t byte() { return static_cast<std::uint8_t>(next() & 0xff); }

    bool chance(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

}  // namespace csign
