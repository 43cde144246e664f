#include "noma/closed_form.hpp"

#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace noma::closed_form {

namespace {

using detail::kInf;
using detail::rate_demand;
using detail::scale_pow2;

void require_positive_rates(const Scenario& scenario) {
    for (const auto& u : scenario.users)
        if (!(u.rate > 0.0)) throw std::invalid_argument("zero-rate users must be removed before equalization");
}

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Same recursion as the linear form, carried in natural-log space and
// normalized by the total. Used once the linear quantities overflow.
PowerAllocation log_domain_pafs(const Scenario& scenario, const DecodingOrder& order) {
    const std::size_t n = order.size();
    std::vector<double> log_b(n);
    double log_suffix = -kInf;
    for (std::size_t i = n; i-- > 0;) {
        const UserStats& u = scenario.users[order[i]];
        // log(2^r - 1), stable for both tiny and huge r
        const double r_ln2 = u.rate * std::numbers::ln2;
        const double log_need = r_ln2 > 30.0 ? r_ln2 + std::log(-std::expm1(-r_ln2))
                                             : std::log(std::expm1(r_ln2));
        log_b[i] = log_need + log_add_exp(std::log(u.weight_per_gain()), log_suffix);
        log_suffix = log_add_exp(log_suffix, log_b[i]);
    }
    PowerAllocation out;
    out.pafs.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out.pafs[order[i]] = std::exp(log_b[i] - log_suffix);
    return out;
}

}  // namespace

DecodingOrder optimal_order(const Scenario& scenario) {
    DecodingOrder order = identity_order(scenario.size());
    std::stable_sort(order.perm.begin(), order.perm.end(), [&](std::size_t a, std::size_t b) {
        const auto& ua = scenario.users[a];
        const auto& ub = scenario.users[b];
        return ua.gamma_bar / ua.weight < ub.gamma_bar / ub.weight;
    });
    return order;
}

double compute_balance(const Scenario& scenario, const DecodingOrder& order) {
    validate(order, scenario.size());
    require_positive_rates(scenario);
    double a = 0.0;
    double decoded_rate = 0.0;  // sum of rates decoded before position i
    for (std::size_t k : order.perm) {
        const UserStats& u = scenario.users[k];
        a += scale_pow2(rate_demand(u.rate) * u.weight_per_gain(), decoded_rate);
        decoded_rate += u.rate;
    }
    return a;
}

PowerAllocation optimal_pafs(const Scenario& scenario, const DecodingOrder& order,
                             double balance_a) {
    validate(order, scenario.size());
    require_positive_rates(scenario);
    if (!(balance_a > 0.0)) throw std::invalid_argument("balance level must be positive");
    if (!std::isfinite(balance_a)) return log_domain_pafs(scenario, order);

    // b_i = alpha_{pi_i} * A
    const std::size_t n = order.size();
    PowerAllocation out;
    out.pafs.assign(n, 0.0);
    double suffix = 0.0;
    for (std::size_t i = n; i-- > 0;) {
        const UserStats& u = scenario.users[order[i]];
        const double b = (u.weight_per_gain() + suffix) * rate_demand(u.rate);
        if (!std::isfinite(b)) return log_domain_pafs(scenario, order);
        out.pafs[order[i]] = b / balance_a;
        suffix += b;
    }
    return out;
}

AllocationResult solve(const Scenario& scenario) {
    validate(scenario);
    const std::size_t n = scenario.size();

    Scenario active;
    active.snr_db = scenario.snr_db;
    std::vector<std::size_t> active_index;
    std::vector<std::size_t> idle_index;
    for (std::size_t k = 0; k < n; ++k) {
        if (scenario.users[k].rate > 0.0) {
            active.users.push_back(scenario.users[k]);
            active_index.push_back(k);
        } else {
            idle_index.push_back(k);
        }
    }

    AllocationResult res;
    res.pafs.pafs.assign(n, 0.0);
    res.outage.assign(n, 0.0);
    res.wsp.assign(n, 1.0);

    if (!active.users.empty()) {
        const DecodingOrder local = optimal_order(active);
        const double a = compute_balance(active, local);
        const PowerAllocation local_pafs = optimal_pafs(active, local, a);
        res.balance_a = a;
        const double wsp = std::exp(-a);
        for (std::size_t i = 0; i < local.size(); ++i) {
            const std::size_t k = active_index[local[i]];
            const UserStats& u = scenario.users[k];
            res.order.perm.push_back(k);
            res.pafs.pafs[k] = local_pafs[local[i]];
            res.thresholds.push_back(a * u.gamma_bar / u.weight);
            res.outage[k] = outage_from_exponent(a / u.weight);
            res.wsp[k] = wsp;
        }
    }
    for (std::size_t k : idle_index) {
        res.order.perm.push_back(k);
        res.thresholds.push_back(0.0);
    }
    return res;
}

}  // namespace noma::closed_form
