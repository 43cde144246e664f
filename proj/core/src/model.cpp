#include "noma/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noma {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPafSumSlack = 1e-12;
}  // namespace

double AllocationResult::min_wsp() const {
    double m = 1.0;
    for (double v : wsp) m = std::min(m, v);
    return m;
}

void validate(const UserStats& user) {
    if (!(user.gamma_bar > 0.0) || !std::isfinite(user.gamma_bar))
        throw std::invalid_argument("gamma_bar must be positive and finite");
    if (!(user.rate >= 0.0) || !std::isfinite(user.rate))
        throw std::invalid_argument("rate must be non-negative and finite");
    if (!(user.weight > 0.0) || !std::isfinite(user.weight))
        throw std::invalid_argument("weight must be positive and finite");
}

void validate(const Scenario& scenario) {
    if (scenario.users.empty()) throw std::invalid_argument("scenario has no users");
    for (const auto& u : scenario.users) validate(u);
}

void validate(const DecodingOrder& order, std::size_t users) {
    if (order.size() != users)
        throw std::invalid_argument("decoding order length " + std::to_string(order.size()) +
                                    " does not match " + std::to_string(users) + " users");
    std::vector<bool> seen(users, false);
    for (std::size_t k : order.perm) {
        if (k >= users || seen[k]) throw std::invalid_argument("decoding order is not a permutation");
        seen[k] = true;
    }
}

void validate(const PowerAllocation& pafs, std::size_t users) {
    if (pafs.size() != users) throw std::invalid_argument("PAF vector length does not match users");
    double sum = 0.0;
    for (double a : pafs.pafs) {
        if (!(a >= 0.0 && a <= 1.0)) throw std::invalid_argument("PAF outside [0,1]");
        sum += a;
    }
    if (sum > 1.0 + kPafSumSlack) throw std::invalid_argument("PAFs sum above 1");
}

DecodingOrder identity_order(std::size_t users) {
    DecodingOrder order;
    order.perm.resize(users);
    std::iota(order.perm.begin(), order.perm.end(), std::size_t{0});
    return order;
}

double snr_threshold(double alpha_k, double alpha_suffix, double rate) {
    if (rate == 0.0) return 0.0;
    const double need = std::expm1(rate * std::numbers::ln2);  // 2^r - 1
    const double denom = alpha_k - need * alpha_suffix;
    if (!(denom > 0.0)) return kInf;
    return need / denom;
}

double decoding_snr(double gamma, double alpha_i, double alpha_suffix) {
    return gamma * alpha_i / (gamma * alpha_suffix + 1.0);
}

double outage_from_exponent(double x) {
    if (x == kInf) return 1.0;
    return -std::expm1(-x);
}

Evaluation evaluate(const Scenario& scenario, const DecodingOrder& order,
                    const PowerAllocation& pafs) {
    const std::size_t n = scenario.size();
    validate(order, n);
    if (pafs.size() != n) throw std::invalid_argument("PAF vector length does not match users");

    Evaluation ev;
    ev.thresholds.resize(n);
    ev.outage.assign(n, 0.0);
    ev.wsp.assign(n, 1.0);

    // Interference still undecoded after each position, summed from the back
    // so the suffix sums are exact for the trailing zero entries.
    std::vector<double> suffix(n, 0.0);
    for (std::size_t i = n; i-- > 1;) suffix[i - 1] = suffix[i] + pafs[order[i]];

    double cumulative = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = order[i];
        const UserStats& u = scenario.users[k];
        const double th = snr_threshold(pafs[k], suffix[i], u.rate);
        ev.thresholds[i] = th;
        if (u.rate == 0.0) continue;
        cumulative = std::max(cumulative, th);
        const double x = cumulative / u.gamma_bar;
        ev.outage[k] = outage_from_exponent(x);
        ev.wsp[k] = x == kInf ? 0.0 : std::exp(-u.weight * x);
    }
    ev.min_wsp = 1.0;
    for (double v : ev.wsp) ev.min_wsp = std::min(ev.min_wsp, v);
    return ev;
}

}  // namespace noma
