#pragma once

// Generators and reference formulas shared by the tests. References are
// written directly from the defining sums in long double and share no code
// with the library.

#include "noma/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace testing_support {

using noma::Scenario;
using noma::UserStats;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
    }

    // Moderate-difficulty users: gamma spans ~3 decades, rates up to 2 bits.
    UserStats user() { return {log_uniform(0.5, 500.0), uniform(0.05, 2.0), uniform(0.05, 1.0)}; }

    Scenario scenario(std::size_t k) {
        Scenario s;
        for (std::size_t i = 0; i < k; ++i) s.users.push_back(user());
        return s;
    }

    // Random point of the open simplex with n entries.
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> v(n);
        for (double& x : v) x = -std::log(uniform(1e-12, 1.0));
        const double total = std::accumulate(v.begin(), v.end(), 0.0);
        for (double& x : v) x /= total;
        return v;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

// A for a given order: sum_k (2^{r_k}-1) (w_k/G_k) 2^{sum_{j<k} r_j}.
inline long double reference_balance(const Scenario& s, const std::vector<std::size_t>& order) {
    long double a = 0.0L, decoded = 0.0L;
    for (std::size_t k : order) {
        const auto& u = s.users[k];
        a += (std::pow(2.0L, (long double)u.rate) - 1.0L) * ((long double)u.weight / u.gamma_bar) *
             std::pow(2.0L, decoded);
        decoded += u.rate;
    }
    return a;
}

// Group function on users already in decode order.
inline long double reference_group_value(const std::vector<UserStats>& users, long double t) {
    long double sum = 0.0L, decoded = 0.0L;
    for (const auto& u : users) {
        if (u.rate == 0.0) continue;
        sum += (std::pow(2.0L, u.rate / t) - 1.0L) * ((long double)u.weight / u.gamma_bar) *
               std::pow(2.0L, decoded / t);
        decoded += u.rate;
    }
    return t * sum;
}

// Direct outage of every user for a given order and PAFs, from the SINR
// definition: stage i decodes iff gamma * a_i / (gamma * suffix_i + 1) >=
// 2^{r_i} - 1, and user pi_k needs stages 1..k.
inline std::vector<long double> reference_outage(const Scenario& s, const std::vector<std::size_t>& order,
                                                 const std::vector<double>& pafs) {
    const std::size_t n = order.size();
    std::vector<long double> out(s.size(), 0.0L);
    long double worst = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = order[i];
        long double suffix = 0.0L;
        for (std::size_t j = i + 1; j < n; ++j) suffix += pafs[order[j]];
        const long double need = std::pow(2.0L, (long double)s.users[k].rate) - 1.0L;
        long double th = 0.0L;
        if (need > 0.0L) {
            const long double den = pafs[k] - need * suffix;
            th = den > 0.0L ? need / den : INFINITY;
        }
        worst = std::max(worst, th);
        out[k] = s.users[k].rate == 0.0 ? 0.0L : 1.0L - std::exp(-worst / s.users[k].gamma_bar);
    }
    return out;
}

inline std::vector<std::vector<std::size_t>> all_orders(std::size_t k) {
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// All compositions of `units` into `parts` positive integers.
inline void compositions(int units, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        cur.push_back(units);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int n = 1; n <= units - (parts - 1); ++n) {
        cur.push_back(n);
        compositions(units - n, parts - 1, cur, out);
        cur.pop_back();
    }
}

inline std::vector<std::vector<int>> compositions(int units, int parts) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    compositions(units, parts, cur, out);
    return out;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace testing_support
