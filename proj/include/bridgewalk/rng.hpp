// rng.hpp — counter-based splittable random streams (SplitMix64 family).
//
// A stream is a pure function of (master seed, stream index). Monte Carlo
// trials use stream index = trial index, so results never depend on how
// trials are distributed over worker threads.
#pragma once

#include <cstdint>

namespace bridgewalk {

inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitRng {
public:
    SplitRng(uint64_t seed, uint64_t stream) {
        state_ = mix64(seed ^ 0x9e3779b97f4a7c15ULL) + mix64(stream + 0x6a09e667f3bcc909ULL);
        gamma_ = mix64(stream ^ (seed * 0xda942042e4dd58b5ULL)) | 1ULL;  // odd increment
    }

    uint64_t next_u64() {
        state_ += gamma_;
        return mix64(state_);
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in {0, ..., n-1}; n must be >= 1
    uint64_t next_below(uint64_t n) { return static_cast<uint64_t>(next_double() * static_cast<double>(n)) % n; }

private:
    uint64_t state_;
    uint64_t gamma_;
};

}  // namespace bridgewalk
