#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, stream, index), so Monte-Carlo loops can be split across threads
// without changing a single bit of the result.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace anosov {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : key_(mix(seed ^ mix(stream + 0x51ed27))) {}

    std::uint64_t bits(std::uint64_t index) const { return mix(key_ + 0x9e3779b97f4a7c15ULL * (index + 1)); }

    // uniform on [0, 1)
    double uniform(std::uint64_t index) const { return double(bits(index) >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller on the counter pair (2i, 2i+1)
    double normal(std::uint64_t index) const {
        double u1 = uniform(2 * index);
        const double u2 = uniform(2 * index + 1);
        if (u1 <= 0.0) u1 = 0x1.0p-54;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    // splitmix64 finaliser
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

}  // namespace anosov
