#pragma once

#include <cstdint>

#include "thermoplate/common.hpp"

namespace thermoplate {

// Counter-based generator: every variate is a pure function of
// (seed, stream, counter), so draws can be pre-assigned to grid points or
// Monte-Carlo trials and the results are reproducible regardless of
// evaluation order or thread schedule.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t word(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t h = mix(seed_ ^ 0x7f4a7c15a5a5a5a5ULL);
        h = mix(h ^ stream);
        h = mix(h ^ counter);
        return h;
    }

    // Uniform in [0, 1).
    double uniform01(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(word(stream, counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in [-1, 1).
    double uniform_sym(std::uint64_t stream, std::uint64_t counter) const {
        return 2.0 * uniform01(stream, counter) - 1.0;
    }

    // Random sign in {-1, +1}.
    int sign(std::uint64_t stream, std::uint64_t counter) const {
        return (word(stream, counter) & 1u) != 0 ? 1 : -1;
    }

    cx complex_sym(std::uint64_t stream, std::uint64_t counter) const {
        return cx(uniform_sym(stream, 2 * counter), uniform_sym(stream, 2 * counter + 1));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace thermoplate
