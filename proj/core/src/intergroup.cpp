#include "noma/intergroup.hpp"

#include "noma/closed_form.hpp"
#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace noma {

namespace {

using detail::kInf;
using detail::rate_demand;
using detail::scale_pow2;

// e^u (1 - u) - 1, i.e. h(x) - h(1) for h(x) = x - x ln x and u = ln x.
// The power series sum_{n>=2} -(n-1) u^n / n! avoids cancellation near 0.
double shifted_h(double u) {
    if (std::abs(u) >= 1.0) return std::exp(u) * (1.0 - u) - 1.0;
    double term = u;  // u^n / n!
    double sum = 0.0;
    for (int n = 2; n < 40; ++n) {
        term *= u / n;
        const double add = -(n - 1) * term;
        sum += add;
        if (std::abs(add) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

void require_positive_time(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("time share must be positive");
}

std::vector<GroupFunction> group_functions(const GroupPartition& partition, const Scenario& scenario) {
    std::vector<GroupFunction> fns;
    fns.reserve(partition.group_count());
    for (std::size_t g = 0; g < partition.group_count(); ++g) {
        const auto users = group_users(partition, g, scenario);
        fns.push_back(GroupFunction::sorted(users));
    }
    return fns;
}

void check_inputs(const GroupPartition& partition, const Scenario& scenario) {
    validate(partition);
    validate(scenario);
    if (scenario.size() > partition.user_count())
        throw std::invalid_argument("partition covers fewer users than the scenario holds");
}

// Fills a0, p and the per-group inner allocations once t is fixed.
// Makes the left-to-right sum of a share vector exactly 1 by absorbing
// the rounding residue into the last positive entry: head + (1 - head)
// rounds to 1 whatever the magnitude of head.
void close_to_one(std::vector<double>& v) {
    std::size_t last = v.size();
    while (last > 0 && v[last - 1] == 0.0) --last;
    if (last == 0) return;
    double head = 0.0;
    for (std::size_t i = 0; i + 1 < last; ++i) head += v[i];
    v[last - 1] = 1.0 - head;
}

void finish_plan(GroupPlan& plan, const std::vector<GroupFunction>& fns, const Scenario& scenario) {
    const std::size_t groups = fns.size();
    std::vector<double> f(groups, 0.0);
    double a0 = 0.0;
    for (std::size_t g = 0; g < groups; ++g) {
        if (!fns[g].empty() && plan.t[g] > 0.0) f[g] = fns[g].value(plan.t[g]);
        a0 += f[g];
    }
    plan.a0 = a0;
    plan.p.assign(groups, 0.0);
    if (a0 == 0.0) {
        // Nothing to deliver anywhere; any split is optimal.
        std::fill(plan.p.begin(), plan.p.end(), 1.0 / static_cast<double>(groups));
    } else if (std::isfinite(a0)) {
        for (std::size_t g = 0; g < groups; ++g) plan.p[g] = f[g] / a0;
    } else {
        std::size_t saturated = 0;
        for (double v : f) saturated += std::isinf(v) ? 1 : 0;
        for (std::size_t g = 0; g < groups; ++g)
            plan.p[g] = std::isinf(f[g]) ? 1.0 / static_cast<double>(saturated) : 0.0;
    }
    close_to_one(plan.p);

    plan.inner.clear();
    plan.inner.reserve(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        Scenario effective;
        effective.snr_db = scenario.snr_db;
        const double t = plan.t[g];
        const double p = plan.p[g];
        for (const UserStats& u : group_users(plan.partition, g, scenario)) {
            UserStats e = u;
            if (u.rate > 0.0 && t > 0.0 && p > 0.0) {
                e.gamma_bar = u.gamma_bar * p / t;
                e.rate = u.rate / t;
            } else if (u.rate > 0.0) {
                // no power or no time: the user cannot be served
                e.rate = u.rate / std::max(t, std::numeric_limits<double>::min());
                e.gamma_bar = std::numeric_limits<double>::min();
            }
            effective.users.push_back(e);
        }
        plan.inner.push_back(closed_form::solve(effective));
    }
}

}  // namespace

GroupFunction::GroupFunction(std::span<const UserStats> users) {
    double cumulative = 0.0;
    for (const UserStats& u : users) {
        if (!(u.rate > 0.0)) continue;
        cumulative += u.rate;
        coef_.push_back(u.weight_per_gain());
        rate_.push_back(u.rate);
        prefix_rate_.push_back(cumulative);
    }
}

GroupFunction GroupFunction::sorted(std::span<const UserStats> users) {
    Scenario s;
    s.users.assign(users.begin(), users.end());
    const DecodingOrder order = closed_form::optimal_order(s);
    std::vector<UserStats> ordered;
    ordered.reserve(users.size());
    for (std::size_t k : order.perm) ordered.push_back(users[k]);
    return GroupFunction(ordered);
}

double GroupFunction::value(double t) const {
    require_positive_time(t);
    double sum = 0.0;
    double decoded = 0.0;
    for (std::size_t l = 0; l < coef_.size(); ++l) {
        sum += scale_pow2(rate_demand(rate_[l] / t) * coef_[l], decoded / t);
        decoded = prefix_rate_[l];
    }
    return t * sum;
}

// f'(t) = sum_{l<L} (c_l - c_{l+1}) (h(x_l) - 1) + c_L (h(x_L) - 1) with
// c = w/Gamma, x_l = 2^{prefix_l / t} and h(x) = x - x ln x. Equal to the
// textbook form because the telescoped coefficients sum to c_1; every term
// has one sign when the users are sorted, so nothing cancels.
double GroupFunction::slope(double t) const {
    require_positive_time(t);
    double sum = 0.0;
    const std::size_t n = coef_.size();
    for (std::size_t l = 0; l < n; ++l) {
        const double c = l + 1 < n ? coef_[l] - coef_[l + 1] : coef_[l];
        if (c == 0.0) continue;
        sum += c * shifted_h(prefix_rate_[l] * std::numbers::ln2 / t);
    }
    return sum;
}

double GroupFunction::curvature(double t) const {
    require_positive_time(t);
    double sum = 0.0;
    const std::size_t n = coef_.size();
    for (std::size_t l = 0; l < n; ++l) {
        const double c = l + 1 < n ? coef_[l] - coef_[l + 1] : coef_[l];
        if (c == 0.0) continue;
        const double u = prefix_rate_[l] * std::numbers::ln2 / t;
        sum += c * std::exp(u) * u * u / t;
    }
    return sum;
}

double f_g(std::span<const UserStats> group, double t) { return GroupFunction(group).value(t); }
double f_g_prime(std::span<const UserStats> group, double t) { return GroupFunction(group).slope(t); }
double f_g_second(std::span<const UserStats> group, double t) { return GroupFunction(group).curvature(t); }

InnerSolution inner_solve(const GroupFunction& fn, double lambda, double eps_inner, int max_iter,
                          double lo_hint, double hi_hint) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("multiplier must be positive");
    if (fn.empty()) throw std::invalid_argument("group has no positive-rate user");

    InnerSolution out;
    auto residual = [&](double t) {
        ++out.iterations;
        return fn.slope(t) + lambda;
    };

    // Bracket: residual(lo) < 0 <= residual(hi). About 1100 halvings span
    // the whole double range, so the bracketing loops need no separate cap.
    constexpr int kBracketCap = 2200;
    double lo = lo_hint > 0.0 ? lo_hint : 1.0;
    double hi = hi_hint > lo ? hi_hint : lo;
    double r_lo = residual(lo);
    for (int i = 0; r_lo >= 0.0; ++i) {
        if (r_lo == 0.0) return {lo, out.iterations};
        if (i == kBracketCap) throw std::runtime_error("inner solve: no lower bracket");
        hi = lo;
        lo *= 0.5;
        r_lo = residual(lo);
    }
    double r_hi = hi > lo ? residual(hi) : r_lo;
    for (int i = 0; r_hi < 0.0; ++i) {
        if (i == kBracketCap) throw std::runtime_error("inner solve: no upper bracket");
        lo = hi;
        hi *= 2.0;
        r_hi = residual(hi);
    }

    double t = std::sqrt(lo * hi);
    for (int iter = 0; iter < max_iter; ++iter) {
        const double r = residual(t);
        if (std::abs(r) <= eps_inner) return {t, out.iterations};
        if (r < 0.0) lo = t;
        else hi = t;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return {t, out.iterations};
        double next = t - r / fn.curvature(t);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        t = next;
    }
    std::ostringstream msg;
    msg.precision(17);
    msg << "inner solve: iteration cap " << max_iter << " reached with bracket [" << lo << ", " << hi << "]";
    throw std::runtime_error(msg.str());
}

double inner_solve(std::span<const UserStats> group, double lambda, double eps_inner) {
    return inner_solve(GroupFunction(group), lambda, eps_inner).t;
}

std::vector<UserStats> group_users(const GroupPartition& partition, std::size_t group,
                                   const Scenario& scenario) {
    std::vector<UserStats> out;
    out.reserve(partition.group_size);
    for (std::size_t k : partition.groups.at(group)) {
        if (k < scenario.size()) out.push_back(scenario.users[k]);
        else out.push_back(UserStats{1.0, 0.0, 1.0});
    }
    return out;
}

GroupPlan continuous_allocate(const GroupPartition& partition, const Scenario& scenario,
                              const SolverConfig& config) {
    check_inputs(partition, scenario);
    config.validate();
    const auto fns = group_functions(partition, scenario);
    const std::size_t groups = fns.size();

    GroupPlan plan;
    plan.partition = partition;
    plan.t.assign(groups, 0.0);

    std::vector<std::size_t> active;
    for (std::size_t g = 0; g < groups; ++g)
        if (!fns[g].empty()) active.push_back(g);

    if (active.empty()) {
        std::fill(plan.t.begin(), plan.t.end(), 1.0 / static_cast<double>(groups));
        finish_plan(plan, fns, scenario);
        return plan;
    }
    if (active.size() == 1) {
        plan.t[active.front()] = 1.0;
        plan.lambda = -fns[active.front()].slope(1.0);
        finish_plan(plan, fns, scenario);
        return plan;
    }

    const std::size_t m = active.size();
    const double t_equal = 1.0 / static_cast<double>(m);

    // Times at a given multiplier, warm-started from a known bracket.
    auto times_at = [&](double lambda, const std::vector<double>& lo, const std::vector<double>& hi,
                        std::vector<double>& t) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto sol = inner_solve(fns[active[i]], lambda, config.eps_inner, config.max_iter_inner,
                                         lo[i], hi[i]);
            plan.stats.inner_iterations += sol.iterations;
            t[i] = sol.t;
            total += sol.t;
        }
        return total;
    };

    // Upper multiplier: the steepest slope at the equal split. Every group
    // then gets t <= 1/m, hence sum t <= 1.
    double lambda_hi = 0.0;
    for (std::size_t g : active) lambda_hi = std::max(lambda_hi, -fns[g].slope(t_equal));
    if (!std::isfinite(lambda_hi)) throw std::runtime_error("continuous allocation: rates overflow the time-share model");

    std::vector<double> zeros(m, 0.0);
    std::vector<double> t_hi(m), t_lo(m), t_mid(m);
    std::vector<double> cap(m, t_equal);
    times_at(lambda_hi, zeros, cap, t_hi);

    // Lower multiplier: halve until the groups want more than the whole slot.
    double lambda_lo = 0.5 * lambda_hi;
    for (;;) {
        if (++plan.stats.outer_iterations > config.max_iter_outer)
            throw std::runtime_error("continuous allocation: no lower multiplier within the iteration cap");
        const double total = times_at(lambda_lo, t_hi, zeros, t_lo);
        if (total > 1.0) break;
        lambda_hi = lambda_lo;
        t_hi = t_lo;
        lambda_lo *= 0.5;
    }

    // Invariant: sum t(lambda_hi) <= 1 < sum t(lambda_lo).
    while (lambda_hi - lambda_lo > config.eps_outer) {
        if (++plan.stats.outer_iterations > config.max_iter_outer)
            throw std::runtime_error("continuous allocation: bisection iteration cap reached");
        const double lambda = 0.5 * (lambda_lo + lambda_hi);
        if (lambda <= lambda_lo || lambda >= lambda_hi) break;
        const double total = times_at(lambda, t_hi, t_lo, t_mid);
        if (total <= 1.0) {
            lambda_hi = lambda;
            t_hi.swap(t_mid);
        } else {
            lambda_lo = lambda;
            t_lo.swap(t_mid);
        }
    }

    // Feasible side, stretched to fill the slot; every f_g decreases.
    double total = 0.0;
    for (double v : t_hi) total += v;
    for (std::size_t i = 0; i < m; ++i) plan.t[active[i]] = t_hi[i] / total;
    close_to_one(plan.t);
    plan.lambda = lambda_hi;
    finish_plan(plan, fns, scenario);
    return plan;
}

GroupPlan equal_time_allocate(const GroupPartition& partition, const Scenario& scenario) {
    check_inputs(partition, scenario);
    const auto fns = group_functions(partition, scenario);
    GroupPlan plan;
    plan.partition = partition;
    plan.t.assign(fns.size(), 1.0 / static_cast<double>(fns.size()));
    finish_plan(plan, fns, scenario);
    return plan;
}

GroupPlan discrete_allocate(const GroupPartition& partition, const Scenario& scenario, int units_per_slot,
                            const SolverConfig& config) {
    check_inputs(partition, scenario);
    config.validate();
    if (units_per_slot < 1) throw std::invalid_argument("units per slot must be at least 1");
    const auto fns = group_functions(partition, scenario);
    const std::size_t groups = fns.size();
    const std::size_t units = groups * static_cast<std::size_t>(units_per_slot);
    const double du = static_cast<double>(units);

    auto f_at = [&](std::size_t g, std::size_t n) {
        return fns[g].empty() ? 0.0 : fns[g].value(static_cast<double>(n) / du);
    };

    std::vector<std::size_t> n(groups, 1);
    std::vector<double> current(groups), gain(groups);
    for (std::size_t g = 0; g < groups; ++g) {
        current[g] = f_at(g, 1);
        gain[g] = current[g] - f_at(g, 2);
    }
    for (std::size_t spare = units - groups; spare > 0; --spare) {
        // An infinite current value always gains the most.
        std::size_t best = 0;
        for (std::size_t g = 1; g < groups; ++g) {
            const bool g_inf = std::isinf(current[g]);
            const bool b_inf = std::isinf(current[best]);
            if (g_inf != b_inf) {
                if (g_inf) best = g;
            } else if (!g_inf && gain[g] > gain[best]) {
                best = g;
            }
        }
        ++n[best];
        current[best] = f_at(best, n[best]);
        gain[best] = current[best] - f_at(best, n[best] + 1);
    }

    GroupPlan plan;
    plan.partition = partition;
    plan.t.resize(groups);
    for (std::size_t g = 0; g < groups; ++g) plan.t[g] = static_cast<double>(n[g]) / du;
    finish_plan(plan, fns, scenario);
    return plan;
}

GroupPlan allocate(const GroupPartition& partition, const Scenario& scenario, const AllocationMode& mode,
                   const SolverConfig& config) {
    switch (mode.kind) {
        case AllocationMode::Kind::kPowerOnly: return equal_time_allocate(partition, scenario);
        case AllocationMode::Kind::kContinuous: return continuous_allocate(partition, scenario, config);
        case AllocationMode::Kind::kDiscrete:
            return discrete_allocate(partition, scenario, mode.units_per_slot, config);
    }
    throw std::invalid_argument("unknown allocation mode");
}

GroupPlan tdma_plan(const Scenario& scenario, const AllocationMode& mode, const SolverConfig& config) {
    validate(scenario);
    return allocate(singleton_partition(scenario.size()), scenario, mode, config);
}

std::vector<double> plan_exponents(const GroupPlan& plan, const Scenario& scenario) {
    std::vector<double> out(scenario.size(), 0.0);
    for (std::size_t k = 0; k < scenario.size(); ++k) {
        const UserStats& u = scenario.users[k];
        if (u.rate > 0.0) out[k] = plan.a0 / u.weight;
    }
    return out;
}

std::vector<double> plan_outage(const GroupPlan& plan, const Scenario& scenario) {
    auto out = plan_exponents(plan, scenario);
    for (double& x : out) x = outage_from_exponent(x);
    return out;
}

}  // namespace noma
