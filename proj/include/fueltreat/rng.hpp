#pragma once

#include <cstdint>
#include <random>

namespace fueltreat {

// Portable random source. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard. The conversions below are written
// out explicitly because std::uniform_*_distribution is implementation
// defined, and runs must reproduce bit-for-bit across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1) from the top 53 bits of one draw.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Uses one draw and a 128-bit multiply
    // (bias below 2^-64 * n, irrelevant at our sizes).
    std::uint64_t below(std::uint64_t n) {
        __extension__ using u128 = unsigned __int128;
        const u128 wide = static_cast<u128>(engine_()) * n;
        return static_cast<std::uint64_t>(wide >> 64);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace fueltreat
