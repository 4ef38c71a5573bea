#pragma once

#include <cstdint>

namespace qnar {

/// splitmix64 step; used both as a key-derivation mixer and as the seeder
/// for the xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// xoshiro256** with explicit, platform-independent double generation.
/// std::* distributions are implementation-defined, so every draw the
/// simulator makes goes through this class to keep outputs byte-stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        for (auto& word : state_) word = splitmix64(seed);
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

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1]; safe as a Pareto inverse-CDF input.
    double open_unit() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

/// Derives a stream key from a master seed plus tags. Replication and staker
/// streams are derived, never split, so evaluation order and thread count
/// cannot change the draws.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t s = master;
    std::uint64_t k = splitmix64(s);
    s = k ^ (tag_a + 0x632BE59BD9B4E019ull);
    k = splitmix64(s);
    s = k ^ (tag_b + 0x1D8E4E27C47D124Full);
    return splitmix64(s);
}

} // namespace qnar
