#pragma once

#include <string>

namespace noma {

// Tolerances and caps for the inter-group time allocation.
struct SolverConfig {
    double eps_outer = 1e-10;  // multiplier bracket width
    double eps_inner = 1e-12;  // |f'(t) + lambda| at the inner root
    int max_iter_outer = 200;
    int max_iter_inner = 100;
    int discrete_t = 0;  // sub-slots per original slot, 0 = continuous

    void validate() const;
};

// How time and power are split across orthogonal groups.
//   kPowerOnly:  equal time, optimized power ("PA")
//   kContinuous: optimized time and power ("PARA")
//   kDiscrete:   integer sub-slots, optimized power
struct AllocationMode {
    enum class Kind { kPowerOnly, kContinuous, kDiscrete };

    Kind kind = Kind::kContinuous;
    int units_per_slot = 1;  // only used by kDiscrete

    static AllocationMode power_only() { return {Kind::kPowerOnly, 1}; }
    static AllocationMode continuous() { return {Kind::kContinuous, 1}; }
    static AllocationMode discrete(int t) { return {Kind::kDiscrete, t}; }

    std::string name() const;
    bool operator==(const AllocationMode&) const = default;
};

}  // namespace noma
