#include "noma/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noma::oracle {

namespace {

std::uint64_t lattice_size(std::uint64_t steps, std::uint64_t parts) {
    // C(steps + parts - 1, parts - 1)
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i < parts; ++i) c = c * (steps + i) / i;
    return c;
}

std::vector<DecodingOrder> all_orders(std::size_t n) {
    std::vector<DecodingOrder> out;
    DecodingOrder o = identity_order(n);
    do out.push_back(o);
    while (std::next_permutation(o.perm.begin(), o.perm.end()));
    return out;
}

// Visits every composition of `steps` into units.size() non-negative parts
// in lexicographic order.
template <typename Visit>
void for_each_composition(std::vector<int>& units, std::size_t pos, int left, Visit&& visit) {
    if (pos + 1 == units.size()) {
        units[pos] = left;
        visit(units);
        return;
    }
    for (int u = 0; u <= left; ++u) {
        units[pos] = u;
        for_each_composition(units, pos + 1, left - u, visit);
    }
}

}  // namespace

GridResult grid_search(const Scenario& scenario, const GridSpec& grid) {
    validate(scenario);
    const std::size_t n = scenario.size();
    if (n > kMaxUsers) throw std::invalid_argument("grid search supports at most 4 users");
    if (grid.steps < 1) throw std::invalid_argument("grid resolution must be in (0, 1]");

    std::vector<DecodingOrder> orders = grid.orders.empty() ? all_orders(n) : grid.orders;
    for (const auto& o : orders) validate(o, n);
    std::sort(orders.begin(), orders.end(), [](const auto& a, const auto& b) { return a.perm < b.perm; });

    const std::uint64_t per_order = lattice_size(static_cast<std::uint64_t>(grid.steps), n);
    if (per_order > kMaxEvaluations / orders.size())
        throw std::length_error("grid search would need more than " + std::to_string(kMaxEvaluations) +
                                    " evaluations");

    GridResult best;
    best.min_wsp = -1.0;
    const double step = 1.0 / grid.steps;
    std::vector<int> units(n, 0);
    PowerAllocation pafs;
    pafs.pafs.assign(n, 0.0);
    for (const auto& order : orders) {
        for_each_composition(units, 0, grid.steps, [&](const std::vector<int>& u) {
            for (std::size_t k = 0; k < n; ++k) pafs.pafs[k] = u[k] * step;
            const double score = evaluate(scenario, order, pafs).min_wsp;
            ++best.evaluations;
            if (score > best.min_wsp) {
                best.min_wsp = score;
                best.order = order;
                best.pafs = pafs;
            }
        });
    }
    return best;
}

bool swap_test(const Scenario& scenario, const DecodingOrder& order, std::size_t m, int steps,
               double tolerance) {
    validate(order, scenario.size());
    if (m + 1 >= order.size()) throw std::invalid_argument("swap position out of range");
    const UserStats& a = scenario.users[order[m]];
    const UserStats& b = scenario.users[order[m + 1]];
    if (!(a.gamma_bar / a.weight > b.gamma_bar / b.weight)) return true;

    DecodingOrder swapped = order;
    std::swap(swapped.perm[m], swapped.perm[m + 1]);
    const double before = grid_search(scenario, GridSpec{steps, {order}}).min_wsp;
    const double after = grid_search(scenario, GridSpec{steps, {swapped}}).min_wsp;
    if (tolerance < 0.0) tolerance = 1.0 / steps;
    return after >= before - tolerance;
}

}  // namespace noma::oracle
