#pragma once

#include <cstdint>

namespace sprshift {

// Counter-based generator built on the SplitMix64 finalizer (Steele, Lea &
// Flood). Draw i of stream s under seed q is mix(key(q,s) + i*GAMMA) -- a
// pure function of (seed, stream, counter), so replicas get independent
// substreams and parallel runs reproduce bit-exactly.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) {
        key_ = mix(seed ^ mix(stream * GAMMA + 0x1b873593a5f4d1c9ULL));
    }

    std::uint64_t next_u64() { return mix(key_ + (++counter_) * GAMMA); }

    // uniform in [0, 1), 53 random bits
    double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t GAMMA = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace sprshift
