#ifndef FMDGT_RNG_HPP
#define FMDGT_RNG_HPP

#include <cstdint>
#include <random>

namespace fmdgt {

// Seeded draws used anywhere reproducibility matters. mt19937_64 output is
// specified by the standard, and the helpers below avoid the
// implementation-defined std::uniform_*_distribution, so identical seeds give
// identical results on every platform.

inline std::uint64_t bounded_u64(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling; unbiased for any n >= 1
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

}  // namespace fmdgt

#endif
