#pragma once

#include "noma/model.hpp"

namespace noma::closed_form {

// Decode users in ascending order of gamma_bar / weight; equal ratios keep
// their original index order.
DecodingOrder optimal_order(const Scenario& scenario);

// Equalized balance level A for the given order. Every user must have a
// positive rate. Saturates to +inf when the 2^(sum of rates) factor
// overflows.
double compute_balance(const Scenario& scenario, const DecodingOrder& order);

// PAFs solving the equal-weighted-success-probability system by backward
// recursion from the last decoded user. The result sums to one.
PowerAllocation optimal_pafs(const Scenario& scenario, const DecodingOrder& order,
                             double balance_a);

// Full max-min solution. Zero-rate users are decoded last with zero power,
// zero outage and unit success probability; all other users end up with
// weighted success probability exp(-A).
AllocationResult solve(const Scenario& scenario);

}  // namespace noma::closed_form
