#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace noma {

// SplitMix64 (Steele, Lea, Flood 2014). Output i of a stream seeded with s is
// mix64(s + (i + 1) * kGolden), so any element can be reached in O(1). All
// conversions below are defined here, never delegated to <random>
// distributions, which keeps streams identical across standard libraries.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kGolden;
        return mix64(state_);
    }

    // [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // (0, 1]; safe as a log argument.
    double uniform_positive() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    // Unit-mean exponential.
    double exponential();

    // Uniform integer in [0, bound), bound > 0, by rejection (no modulo bias).
    std::uint64_t below(std::uint64_t bound);

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

// Seed of sub-stream `index` under `master`: element index of the master
// stream. Trials use index = trial number; derived streams nest the call.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return SplitMix64::mix64(master + (index + 1) * SplitMix64::kGolden);
}

// Fisher-Yates shuffle driven by SplitMix64::below.
template <typename T>
void shuffle(std::span<T> items, SplitMix64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace noma
