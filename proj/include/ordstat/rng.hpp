#pragma once

#include <cstdint>

namespace ordstat {

// SplitMix64 stream keyed by (seed, counter). Every Monte Carlo trial gets
// its own stream, so trials can be evaluated in any order or on any thread
// and still see the same numbers.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t counter) noexcept
        : state_(mix(seed ^ mix(counter + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace ordstat
