#include "noma/sim.hpp"

#include "noma/closed_form.hpp"
#include "noma/grouping.hpp"
#include "noma/rng.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace noma::sim {

namespace {

std::size_t parse_count(std::string_view s, std::string_view whole) {
    std::size_t v = 0;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || v == 0)
        throw std::invalid_argument("bad number in scheme '" + std::string(whole) + "'");
    return v;
}

// "(a)" or "(a,b)" at the front of s; returns the numbers and the rest.
std::vector<std::size_t> parse_args(std::string_view& s, std::string_view whole) {
    if (s.empty() || s.front() != '(') throw std::invalid_argument("expected '(' in scheme '" + std::string(whole) + "'");
    const auto close = s.find(')');
    if (close == std::string_view::npos) throw std::invalid_argument("unbalanced '(' in scheme '" + std::string(whole) + "'");
    std::string_view inner = s.substr(1, close - 1);
    s.remove_prefix(close + 1);
    std::vector<std::size_t> out;
    while (!inner.empty()) {
        const auto comma = inner.find(',');
        out.push_back(parse_count(inner.substr(0, comma), whole));
        if (comma == std::string_view::npos) break;
        inner.remove_prefix(comma + 1);
    }
    return out;
}

AllocationMode parse_mode(std::string_view s, std::string_view whole) {
    if (s == "PA") return AllocationMode::power_only();
    if (s == "PARA") return AllocationMode::continuous();
    if (s.starts_with("discrete")) {
        s.remove_prefix(8);
        const auto args = parse_args(s, whole);
        if (args.size() != 1 || !s.empty()) throw std::invalid_argument("bad discrete mode in '" + std::string(whole) + "'");
        return AllocationMode::discrete(static_cast<int>(args[0]));
    }
    throw std::invalid_argument("unknown allocation mode in scheme '" + std::string(whole) + "'");
}

}  // namespace

void GeometryConfig::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
    if (!(eta > 0.0)) throw std::invalid_argument("pathloss exponent must be positive");
    if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
}

void McConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (!(r_sum > 0.0) || !std::isfinite(r_sum)) throw std::invalid_argument("r_sum must be positive");
    if (schemes.empty()) throw std::invalid_argument("no schemes requested");
    solver.validate();
}

std::string Scheme::name() const {
    switch (access) {
        case Access::kNoma: return "NOMA";
        case Access::kTdma: return "TDMA-" + mode.name();
        case Access::kNomaRandom: return "NOMA-R(" + std::to_string(group_size) + ")-" + mode.name();
        case Access::kNomaOptimal: return "NOMA-O(" + std::to_string(group_size) + ")-" + mode.name();
    }
    return "?";
}

Scheme Scheme::parse(std::string_view text) {
    const std::string_view whole = text;
    Scheme s;
    if (text == "NOMA") return s;
    if (text.starts_with("TDMA-")) {
        s.access = Access::kTdma;
        s.mode = parse_mode(text.substr(5), whole);
        return s;
    }
    if (!text.starts_with("NOMA-")) throw std::invalid_argument("unknown scheme '" + std::string(whole) + "'");
    text.remove_prefix(5);

    if (text.starts_with("R(") || text.starts_with("O(")) {
        s.access = text.front() == 'R' ? Access::kNomaRandom : Access::kNomaOptimal;
        text.remove_prefix(1);
        const auto args = parse_args(text, whole);
        if (args.size() != 1) throw std::invalid_argument("expected group size in '" + std::string(whole) + "'");
        s.group_size = args[0];
        if (text.empty()) return s;
        if (text.front() != '-') throw std::invalid_argument("unexpected text in scheme '" + std::string(whole) + "'");
        s.mode = parse_mode(text.substr(1), whole);
        return s;
    }

    // NOMA-PA(L), NOMA-PARA(L), NOMA-discrete(L,T): random grouping
    s.access = Access::kNomaRandom;
    const auto paren = text.find('(');
    if (paren == std::string_view::npos) throw std::invalid_argument("unknown scheme '" + std::string(whole) + "'");
    const std::string_view kind = text.substr(0, paren);
    text.remove_prefix(paren);
    const auto args = parse_args(text, whole);
    if (!text.empty()) throw std::invalid_argument("unexpected text in scheme '" + std::string(whole) + "'");
    if (kind == "PA" && args.size() == 1) s.mode = AllocationMode::power_only();
    else if (kind == "PARA" && args.size() == 1) s.mode = AllocationMode::continuous();
    else if (kind == "discrete" && args.size() == 2) s.mode = AllocationMode::discrete(static_cast<int>(args[1]));
    else throw std::invalid_argument("unknown scheme '" + std::string(whole) + "'");
    s.group_size = args[0];
    return s;
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t index) { return derive_seed(master, index); }

Scenario sample_scenario(const GeometryConfig& geometry, std::size_t k, double r_sum, std::uint64_t seed) {
    geometry.validate();
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    SplitMix64 rng(seed);
    Scenario s;
    s.snr_db = geometry.snr_db;
    s.users.resize(k);
    const double snr = std::pow(10.0, geometry.snr_db / 10.0);
    for (auto& u : s.users) {
        const double d = geometry.radius * std::sqrt(rng.uniform_positive());
        u.gamma_bar = snr * std::pow(d, -geometry.eta);
    }
    std::vector<double> e(k);
    for (double& v : e) v = rng.exponential();
    const double total = pairwise_sum(e);
    for (std::size_t i = 0; i < k; ++i) s.users[i].rate = r_sum * (e[i] / total);
    for (auto& u : s.users) u.weight = rng.uniform_positive();
    return s;
}

std::vector<double> scheme_exponents(const Scheme& scheme, const Scenario& scenario, std::uint64_t seed,
                                     const SolverConfig& solver, double* a0) {
    using Access = Scheme::Access;
    if (scheme.access == Access::kNoma) {
        const AllocationResult r = closed_form::solve(scenario);
        if (a0) *a0 = r.balance_a;
        std::vector<double> out(scenario.size(), 0.0);
        for (std::size_t k = 0; k < scenario.size(); ++k)
            if (scenario.users[k].rate > 0.0) out[k] = r.balance_a / scenario.users[k].weight;
        return out;
    }

    GroupPlan plan;
    if (scheme.access == Access::kTdma) {
        plan = tdma_plan(scenario, scheme.mode, solver);
    } else {
        const std::size_t padded = pad_virtual_users(scenario, scheme.group_size).scenario.size();
        GroupPartition partition;
        if (scheme.access == Access::kNomaRandom) {
            partition = random_partition(padded, scheme.group_size, derive_seed(seed, 1));
        } else {
            partition = optimal_partition(scenario, scheme.group_size, scheme.mode, solver).partition;
        }
        partition.virtual_count = padded - scenario.size();
        plan = allocate(partition, scenario, scheme.mode, solver);
    }
    if (a0) *a0 = plan.a0;
    return plan_exponents(plan, scenario);
}

TrialOutcome run_trial(const McConfig& mc, const GeometryConfig& geometry, std::size_t index) {
    const std::uint64_t seed = trial_seed(mc.seed, index);
    TrialOutcome out;
    out.scenario = sample_scenario(geometry, mc.k, mc.r_sum, seed);
    out.exponents.reserve(mc.schemes.size());
    out.a0.resize(mc.schemes.size());
    for (std::size_t s = 0; s < mc.schemes.size(); ++s)
        out.exponents.push_back(scheme_exponents(mc.schemes[s], out.scenario, seed, mc.solver, &out.a0[s]));
    return out;
}

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("NOMA_BALANCE_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
    }
    if (n == 0) n = std::thread::hardware_concurrency();
    return std::max(1u, n);
}

std::vector<TrialOutcome> run_trial_outcomes(const McConfig& mc, const GeometryConfig& geometry) {
    mc.validate();
    geometry.validate();
    std::vector<TrialOutcome> outcomes(mc.trials);
    const unsigned workers = std::min<std::size_t>(resolve_threads(mc.threads), mc.trials);

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_trial = 0;
    auto work = [&] {
        for (std::size_t i = next++; i < mc.trials; i = next++) {
            try {
                outcomes[i] = run_trial(mc, geometry, i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error || i < error_trial) {
                    error = std::current_exception();
                    error_trial = i;
                }
                next = mc.trials;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const std::exception& e) {
            throw std::runtime_error("trial " + std::to_string(error_trial) + ": " + e.what());
        }
    }
    return outcomes;
}

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

McSummary summarize(const McConfig& mc, std::span<const TrialOutcome> outcomes) {
    McSummary out;
    out.schemes = mc.schemes;
    out.trials = outcomes.size();
    out.seed = mc.seed;
    std::vector<double> column(outcomes.size());
    for (std::size_t s = 0; s < mc.schemes.size(); ++s) {
        std::vector<double> avg(mc.k, 0.0);
        for (std::size_t k = 0; k < mc.k; ++k) {
            for (std::size_t i = 0; i < outcomes.size(); ++i)
                column[i] = outage_from_exponent(outcomes[i].exponents[s][k]);
            avg[k] = pairwise_sum(column) / static_cast<double>(outcomes.size());
        }
        out.avg_outage.push_back(std::move(avg));
    }
    return out;
}

McSummary run_trials(const McConfig& mc, const GeometryConfig& geometry) {
    const auto outcomes = run_trial_outcomes(mc, geometry);
    return summarize(mc, outcomes);
}

std::string to_csv(const McSummary& summary) {
    std::string out = "scheme,user,avg_outage,trials,seed\n";
    char buf[64];
    for (std::size_t s = 0; s < summary.schemes.size(); ++s) {
        const std::string name = summary.schemes[s].name();
        for (std::size_t k = 0; k < summary.avg_outage[s].size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", summary.avg_outage[s][k]);
            out += name + "," + std::to_string(k + 1) + "," + buf + "," + std::to_string(summary.trials) + "," +
                   std::to_string(summary.seed) + "\n";
        }
    }
    return out;
}

double average_outage(const SnrCurve& curve, double snr_db, std::size_t focus_user) {
    if (curve.exponents.empty()) throw std::invalid_argument("empty SNR curve");
    const double scale = std::pow(10.0, (curve.reference_snr_db - snr_db) / 10.0);
    std::vector<double> values;
    for (const auto& trial : curve.exponents) {
        if (focus_user == 0) {
            for (double x : trial) values.push_back(outage_from_exponent(x * scale));
        } else {
            if (focus_user > trial.size()) throw std::invalid_argument("focus user out of range");
            values.push_back(outage_from_exponent(trial[focus_user - 1] * scale));
        }
    }
    return pairwise_sum(values) / static_cast<double>(values.size());
}

RequiredSnr required_snr(const SnrCurve& curve, double target, double tol_db, std::size_t focus_user) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target outage must lie in (0, 1)");
    if (!(tol_db > 0.0)) throw std::invalid_argument("tolerance must be positive");
    RequiredSnr out;
    auto probe = [&](double snr) {
        ++out.probes;
        return average_outage(curve, snr, focus_user);
    };

    // Average outage decreases with SNR: lo has too much outage, hi too little.
    constexpr int kExpansions = 60;
    double lo = curve.reference_snr_db - 10.0;
    double hi = curve.reference_snr_db + 10.0;
    for (int i = 0; probe(lo) <= target; ++i) {
        if (i == kExpansions) throw std::runtime_error("required SNR: no lower bracket");
        lo -= 10.0;
    }
    for (int i = 0; probe(hi) > target; ++i) {
        if (i == kExpansions) throw std::runtime_error("required SNR: target outage not reachable");
        hi += 10.0;
    }
    while (hi - lo > tol_db) {
        const double mid = 0.5 * (lo + hi);
        if (probe(mid) > target) lo = mid;
        else hi = mid;
    }
    out.lo_db = lo;
    out.hi_db = hi;
    out.snr_db = 0.5 * (lo + hi);
    out.avg_outage = probe(out.snr_db);
    return out;
}

SnrCurve snr_curve(const Scheme& scheme, const McConfig& mc, const GeometryConfig& geometry) {
    McConfig single = mc;
    single.schemes = {scheme};
    const auto outcomes = run_trial_outcomes(single, geometry);
    SnrCurve curve;
    curve.reference_snr_db = geometry.snr_db;
    curve.exponents.reserve(outcomes.size());
    for (const auto& o : outcomes) curve.exponents.push_back(o.exponents.front());
    return curve;
}

RequiredSnr required_snr(const Scheme& scheme, const McConfig& mc, const GeometryConfig& geometry, double target,
                         double tol_db, std::size_t focus_user) {
    return required_snr(snr_curve(scheme, mc, geometry), target, tol_db, focus_user);
}

std::vector<NamedScenario> table1_scenarios(double snr_db, double eta) {
    struct Row {
        const char* name;
        double r[3], w[3], d[3];
    };
    static constexpr Row kRows[] = {
        {"G1", {0.57, 0.04, 1.39}, {0.39, 0.30, 0.31}, {0.453, 0.788, 0.417}},
        {"G2", {0.91, 0.35, 0.74}, {0.11, 0.29, 0.60}, {0.535, 0.981, 0.480}},
        {"G3", {0.47, 0.74, 0.79}, {0.25, 0.35, 0.40}, {0.904, 0.842, 0.208}},
        {"G4", {0.65, 0.23, 1.12}, {0.45, 0.46, 0.09}, {0.636, 0.550, 0.870}},
        {"G5", {0.73, 0.22, 1.05}, {0.32, 0.26, 0.42}, {0.951, 0.531, 0.784}},
    };
    const double snr = std::pow(10.0, snr_db / 10.0);
    std::vector<NamedScenario> out;
    for (const Row& row : kRows) {
        NamedScenario ns{row.name, {}};
        ns.scenario.snr_db = snr_db;
        for (int k = 0; k < 3; ++k)
            ns.scenario.users.push_back({snr * std::pow(row.d[k], -eta), row.r[k], row.w[k]});
        out.push_back(std::move(ns));
    }
    return out;
}

}  // namespace noma::sim
