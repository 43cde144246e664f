#pragma once

#include "noma/intergroup.hpp"
#include "noma/model.hpp"
#include "noma/solver_config.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace noma::sim {

// Users uniform on a disk around the source; mean SNR P/N0 * d^-eta.
struct GeometryConfig {
    double radius = 1.0;
    double eta = 3.75;
    double snr_db = 15.0;

    void validate() const;
};

// One access scheme of the experiment.
//   NOMA                 all users superposed, closed-form allocation
//   TDMA-<mode>          one user per group
//   NOMA-R(L)-<mode>     random groups of L, NOMA inside each group
//   NOMA-O(L)-<mode>     exhaustively optimal groups of L
// <mode> is PA, PARA or discrete(T). Accepted shorthands: NOMA-R(L) and
// NOMA-O(L) mean PARA; NOMA-PA(L), NOMA-PARA(L) and NOMA-discrete(L,T) use
// random groups.
struct Scheme {
    enum class Access { kNoma, kTdma, kNomaRandom, kNomaOptimal };

    Access access = Access::kNoma;
    std::size_t group_size = 1;
    AllocationMode mode = AllocationMode::continuous();

    std::string name() const;
    static Scheme parse(std::string_view text);

    bool operator==(const Scheme&) const = default;
};

struct McConfig {
    std::size_t trials = 5000;
    std::size_t k = 10;
    double r_sum = 3.0;
    std::vector<Scheme> schemes;
    std::uint64_t seed = 1;
    SolverConfig solver;
    unsigned threads = 0;  // 0: NOMA_BALANCE_THREADS, else hardware concurrency

    void validate() const;
};

// avg_outage[s][k]: outage of user k under scheme s, averaged over trials.
struct McSummary {
    std::vector<Scheme> schemes;
    std::vector<std::vector<double>> avg_outage;
    std::size_t trials = 0;
    std::uint64_t seed = 0;

    bool operator==(const McSummary&) const = default;
};

// Everything one trial produced. exponents[s][k] = A_0 / w_k under scheme
// s, so outage = 1 - exp(-exponent) and every exponent scales as 1/SNR.
struct TrialOutcome {
    Scenario scenario;
    std::vector<std::vector<double>> exponents;
    std::vector<double> a0;
};

// Seed of trial `index`: element `index` of the SplitMix64 stream of the
// master seed. Random grouping inside a trial uses derive_seed(trial, 1).
std::uint64_t trial_seed(std::uint64_t master, std::size_t index);

// Draw order from SplitMix64(trial_seed): k distances d = R sqrt(u), then k
// unit exponentials normalized onto the rate simplex, then k weights in
// (0, 1].
Scenario sample_scenario(const GeometryConfig& geometry, std::size_t k, double r_sum, std::uint64_t trial_seed);

// Per-user exponents A_0 / w_k of one scheme on one scenario.
std::vector<double> scheme_exponents(const Scheme& scheme, const Scenario& scenario, std::uint64_t trial_seed,
                                     const SolverConfig& solver, double* a0 = nullptr);

TrialOutcome run_trial(const McConfig& mc, const GeometryConfig& geometry, std::size_t index);

// All trials, in trial order, computed on a worker pool.
std::vector<TrialOutcome> run_trial_outcomes(const McConfig& mc, const GeometryConfig& geometry);

McSummary summarize(const McConfig& mc, std::span<const TrialOutcome> outcomes);
McSummary run_trials(const McConfig& mc, const GeometryConfig& geometry);

// Pairwise (cascade) summation; result depends only on the input order.
double pairwise_sum(std::span<const double> values);

// Worker count after applying the NOMA_BALANCE_THREADS override.
unsigned resolve_threads(unsigned requested);

// header scheme,user,avg_outage,trials,seed; users 1-based; %.17g floats.
std::string to_csv(const McSummary& summary);

// Per-trial exponents of one scheme, measured at reference_snr_db. Since
// every balance level is inversely proportional to the transmit SNR, the
// outage at any other SNR follows without re-solving.
struct SnrCurve {
    double reference_snr_db = 0.0;
    std::vector<std::vector<double>> exponents;  // [trial][user]
};

// focus_user is 1-based; 0 averages over all users of all trials.
double average_outage(const SnrCurve& curve, double snr_db, std::size_t focus_user = 1);

struct RequiredSnr {
    double snr_db = 0.0;
    double avg_outage = 0.0;
    double lo_db = 0.0;
    double hi_db = 0.0;
    int probes = 0;
};

// Bisection on P/N0 (dB) for the SNR at which the average outage reaches
// target. The bracket starts at reference +/- 10 dB and grows by 10 dB
// steps (at most 60) until it straddles the target.
RequiredSnr required_snr(const SnrCurve& curve, double target_outage, double tol_db, std::size_t focus_user = 1);

SnrCurve snr_curve(const Scheme& scheme, const McConfig& mc, const GeometryConfig& geometry);

RequiredSnr required_snr(const Scheme& scheme, const McConfig& mc, const GeometryConfig& geometry,
                         double target_outage, double tol_db, std::size_t focus_user = 1);

struct NamedScenario {
    std::string name;
    Scenario scenario;
};

// The five K=3 verification parameter sets G1..G5 (rates, weights,
// distances), with gamma_bar = P/N0 * d^-eta.
std::vector<NamedScenario> table1_scenarios(double snr_db = 10.0, double eta = 3.75);

}  // namespace noma::sim
