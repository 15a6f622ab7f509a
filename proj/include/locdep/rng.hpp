#pragma once

#include <array>
#include <cstdint>

namespace locdep {

// All randomness in the library flows from one master seed through the split
// function below; there is no global RNG state.  A substream is addressed by
// (master seed, stream id, replicate index), so replicate-level parallelism
// reproduces bit-identically for any worker count.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with state derived from (seed, stream, index) via splitmix64.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
        std::uint64_t s = seed;
        s ^= splitmix64(stream) + 0x9E3779B97F4A7C15ULL;
        std::uint64_t mix = s ^ (0xD1B54A32D192ED03ULL * (index + 1));
        for (auto& word : state_) word = splitmix64(mix);
    }

    explicit Rng(std::uint64_t seed) : Rng(seed, 0, 0) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // +1 or -1 with equal probability.
    double next_sign() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    // Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_;
};

// Stream ids used by the estimation routines.  Distinct ids keep the
// substreams of different estimators non-overlapping under one master seed.
namespace streams {
inline constexpr std::uint64_t kSample = 1;        // sample(model, seed)
inline constexpr std::uint64_t kRTermsPhase1 = 2;  // r1 pilot phase
inline constexpr std::uint64_t kRTermsPhase2 = 3;  // main r-term replicates
inline constexpr std::uint64_t kKolmogorov = 4;
inline constexpr std::uint64_t kProfile = 5;
inline constexpr std::uint64_t kMoments = 6;
inline constexpr std::uint64_t kPilotVariance = 7;
inline constexpr std::uint64_t kIntervals = 8;
}  // namespace streams

}  // namespace locdep
