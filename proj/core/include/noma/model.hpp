#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace noma {

// Statistical channel description of one user. gamma_bar is the mean of the
// exponentially distributed channel SNR (Rayleigh fading), linear scale.
struct UserStats {
    double gamma_bar = 1.0;
    double rate = 0.0;    // bits/s/Hz
    double weight = 1.0;  // fairness weight of the success probability

    // w / Gamma; the solver works almost exclusively with this ratio.
    double weight_per_gain() const { return weight / gamma_bar; }
};

struct Scenario {
    std::vector<UserStats> users;
    double snr_db = 0.0;  // informational once gamma_bar has been set

    std::size_t size() const { return users.size(); }
};

// perm[i] is the (0-based) user whose signal is decoded i-th.
struct DecodingOrder {
    std::vector<std::size_t> perm;

    std::size_t size() const { return perm.size(); }
    std::size_t operator[](std::size_t i) const { return perm[i]; }
    bool operator==(const DecodingOrder&) const = default;
};

// Power allocation factors indexed by user (not by decode position).
struct PowerAllocation {
    std::vector<double> pafs;

    std::size_t size() const { return pafs.size(); }
    double operator[](std::size_t k) const { return pafs[k]; }
};

struct AllocationResult {
    DecodingOrder order;
    PowerAllocation pafs;
    double balance_a = 0.0;
    std::vector<double> thresholds;  // gamma_th in decode order
    std::vector<double> outage;      // by user
    std::vector<double> wsp;         // by user

    double min_wsp() const;
};

// Outcome of evaluating an arbitrary (order, PAF) pair.
struct Evaluation {
    std::vector<double> thresholds;  // per decode position, not cumulated
    std::vector<double> outage;      // by user
    std::vector<double> wsp;         // by user
    double min_wsp = 1.0;
};

// Throws std::invalid_argument when a field violates its invariant.
void validate(const UserStats& user);
void validate(const Scenario& scenario);
void validate(const DecodingOrder& order, std::size_t users);
void validate(const PowerAllocation& pafs, std::size_t users);

DecodingOrder identity_order(std::size_t users);

// Channel SNR needed to decode a signal holding alpha_k of the power while
// alpha_suffix of the power is still undecoded interference. Returns +inf
// when the signal can never be decoded and 0 for a zero-rate signal.
double snr_threshold(double alpha_k, double alpha_suffix, double rate);

// SINR seen while decoding a signal of power share alpha_i with
// alpha_suffix of the power remaining as interference.
double decoding_snr(double gamma, double alpha_i, double alpha_suffix);

// Exact per-user outage under Rayleigh fading. A user fails when any SIC
// stage up to and including its own signal fails. Zero-rate users carry no
// data and are never in outage.
Evaluation evaluate(const Scenario& scenario, const DecodingOrder& order,
                    const PowerAllocation& pafs);

// 1 - exp(-x) computed without cancellation; x may be +inf.
double outage_from_exponent(double x);

}  // namespace noma
