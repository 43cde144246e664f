#pragma once

#include "noma/model.hpp"

#include <cstdint>
#include <vector>

namespace noma::oracle {

// Simplex lattice of PAF vectors with step 1/steps, searched over the given
// decoding orders (all K! orders when `orders` is empty).
struct GridSpec {
    int steps = 200;  // resolution = 1/steps
    std::vector<DecodingOrder> orders;

    double resolution() const { return 1.0 / steps; }
};

struct GridResult {
    DecodingOrder order;
    PowerAllocation pafs;
    double min_wsp = 0.0;
    std::uint64_t evaluations = 0;
};

inline constexpr std::uint64_t kMaxEvaluations = 50'000'000;
inline constexpr std::size_t kMaxUsers = 4;

// Exhaustive max-min search scored by the exact evaluator. Orders are
// visited lexicographically and lattice points in lexicographic order of
// their unit counts; the first strict maximum wins.
GridResult grid_search(const Scenario& scenario, const GridSpec& grid = {});

// Swapping the adjacent pair at positions (m, m+1) (0-based m) when it
// violates the gamma_bar/weight ordering must not lower the best
// achievable min-WSP by more than `tolerance`; a negative tolerance means one
// grid step, 1/steps. Orders sharing a last-stage bottleneck tie in the
// continuum and differ only by lattice error. Sorted pairs pass vacuously.
bool swap_test(const Scenario& scenario, const DecodingOrder& order, std::size_t m, int steps = 200,
               double tolerance = -1.0);

}  // namespace noma::oracle
