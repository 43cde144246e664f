#include "noma/rng.hpp"

#include <cmath>

namespace noma {

double SplitMix64::exponential() { return -std::log(uniform_positive()); }

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    // Reject the top partial bucket so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
}

}  // namespace noma
