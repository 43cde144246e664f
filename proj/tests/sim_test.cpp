#include "noma/closed_form.hpp"
#include "noma/rng.hpp"
#include "noma/sim.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace noma;
using namespace noma::sim;

namespace {

McConfig small_config(std::vector<std::string> names, std::size_t trials = 40, std::uint64_t seed = 5) {
    McConfig mc;
    mc.trials = trials;
    mc.k = 6;
    mc.r_sum = 3.0;
    mc.seed = seed;
    for (const auto& n : names) mc.schemes.push_back(Scheme::parse(n));
    return mc;
}

double min_wsp_of(const std::vector<double>& exponents, const Scenario& s) {
    double worst = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, exponents[k] * s.users[k].weight);
    return std::exp(-worst);
}

}  // namespace

TEST(SplitMix64, ReferenceStream) {
    // First outputs for seed 1234567 of the published SplitMix64 recurrence.
    SplitMix64 rng(1234567);
    EXPECT_EQ(rng.next(), 6457827717110365317ULL);
    EXPECT_EQ(rng.next(), 3203168211198807973ULL);
    EXPECT_EQ(rng.next(), 9817491932198370423ULL);
}

TEST(SplitMix64, UniformRangesAndBelow) {
    SplitMix64 rng(9);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const double u = rng.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        const double v = rng.uniform_positive();
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.0);
        counts[rng.below(7)]++;
    }
    for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(SplitMix64, ExponentialMean) {
    SplitMix64 rng(10);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.exponential();
    EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(TrialSeed, CounterBasedAndDistinct) {
    EXPECT_EQ(trial_seed(42, 3), trial_seed(42, 3));
    EXPECT_NE(trial_seed(42, 3), trial_seed(42, 4));
    EXPECT_NE(trial_seed(42, 3), trial_seed(43, 3));
}

TEST(SampleScenario, DeterministicAndWellFormed) {
    GeometryConfig geo;
    for (std::uint64_t i = 0; i < 500; ++i) {
        const Scenario a = sample_scenario(geo, 7, 2.5, trial_seed(3, i));
        const Scenario b = sample_scenario(geo, 7, 2.5, trial_seed(3, i));
        double rates = 0.0;
        for (std::size_t k = 0; k < 7; ++k) {
            EXPECT_EQ(a.users[k].gamma_bar, b.users[k].gamma_bar);
            EXPECT_EQ(a.users[k].rate, b.users[k].rate);
            EXPECT_EQ(a.users[k].weight, b.users[k].weight);
            EXPECT_GT(a.users[k].gamma_bar, 0.0);
            EXPECT_GT(a.users[k].weight, 0.0);
            EXPECT_LE(a.users[k].weight, 1.0);
            rates += a.users[k].rate;
        }
        EXPECT_NEAR(rates, 2.5, 1e-12);
    }
}

TEST(SampleScenario, DiskUniformSecondMoment) {
    GeometryConfig geo;
    geo.snr_db = 0.0;
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Scenario s = sample_scenario(geo, 1, 1.0, trial_seed(77, i));
        const double d = std::pow(s.users[0].gamma_bar, -1.0 / geo.eta);
        sum += d * d;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.01);
}

TEST(Scheme, ParseAndName) {
    EXPECT_EQ(Scheme::parse("NOMA").name(), "NOMA");
    EXPECT_EQ(Scheme::parse("TDMA-PA").name(), "TDMA-PA");
    EXPECT_EQ(Scheme::parse("TDMA-PARA").name(), "TDMA-PARA");
    EXPECT_EQ(Scheme::parse("TDMA-discrete(3)").name(), "TDMA-discrete(3)");
    EXPECT_EQ(Scheme::parse("NOMA-R(2)").name(), "NOMA-R(2)-PARA");
    EXPECT_EQ(Scheme::parse("NOMA-O(3)-PA").name(), "NOMA-O(3)-PA");
    EXPECT_EQ(Scheme::parse("NOMA-PA(2)"), Scheme::parse("NOMA-R(2)-PA"));
    EXPECT_EQ(Scheme::parse("NOMA-PARA(4)"), Scheme::parse("NOMA-R(4)-PARA"));
    EXPECT_EQ(Scheme::parse("NOMA-discrete(2,3)"), Scheme::parse("NOMA-R(2)-discrete(3)"));
    for (const char* bad : {"", "noma", "TDMA", "TDMA-XX", "NOMA-R", "NOMA-R(0)", "NOMA-R(2", "NOMA-R(2)x",
                            "NOMA-discrete(2)", "TDMA-discrete(0)", "NOMA-Q(2)"})
        EXPECT_THROW(Scheme::parse(bad), std::invalid_argument) << bad;
}

TEST(RunTrials, SingleTrialEqualsItsOutcome) {
    const McConfig mc = small_config({"NOMA", "TDMA-PARA"}, 1);
    const GeometryConfig geo;
    const McSummary sum = run_trials(mc, geo);
    const TrialOutcome t = run_trial(mc, geo, 0);
    ASSERT_EQ(sum.trials, 1u);
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t k = 0; k < mc.k; ++k)
            EXPECT_EQ(sum.avg_outage[s][k], outage_from_exponent(t.exponents[s][k]));
    const AllocationResult direct = closed_form::solve(t.scenario);
    for (std::size_t k = 0; k < mc.k; ++k) EXPECT_NEAR(sum.avg_outage[0][k], direct.outage[k], 1e-15);
}

TEST(RunTrials, BitIdenticalAcrossRunsAndThreadCounts) {
    McConfig mc = small_config({"NOMA", "TDMA-PA", "NOMA-R(2)", "NOMA-O(2)-PA"}, 60);
    const GeometryConfig geo;
    mc.threads = 1;
    const McSummary a = run_trials(mc, geo);
    mc.threads = 3;
    const McSummary b = run_trials(mc, geo);
    const McSummary c = run_trials(mc, geo);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b, c);
    EXPECT_EQ(to_csv(a), to_csv(c));
    mc.seed = 6;
    EXPECT_NE(to_csv(run_trials(mc, geo)), to_csv(a));
}

TEST(RunTrials, ThreadOverrideFromEnvironment) {
    ::setenv("NOMA_BALANCE_THREADS", "3", 1);
    EXPECT_EQ(resolve_threads(0), 3u);
    EXPECT_EQ(resolve_threads(2), 2u);
    ::setenv("NOMA_BALANCE_THREADS", "0", 1);
    EXPECT_GE(resolve_threads(0), 1u);
    ::unsetenv("NOMA_BALANCE_THREADS");
}

TEST(RunTrials, ErrorsCarryTheTrialIndex) {
    McConfig mc = small_config({"NOMA-O(2)"}, 3);
    mc.k = 30;  // far beyond the partition enumeration cap
    try {
        run_trials(mc, GeometryConfig{});
        FAIL() << "expected an error";
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find("trial 0"), std::string::npos) << e.what();
    }
}

TEST(RunTrials, ConfigValidation) {
    const GeometryConfig geo;
    McConfig mc = small_config({"NOMA"});
    mc.trials = 0;
    EXPECT_THROW(run_trials(mc, geo), std::invalid_argument);
    mc = small_config({});
    EXPECT_THROW(run_trials(mc, geo), std::invalid_argument);
    mc = small_config({"NOMA"});
    mc.r_sum = 0.0;
    EXPECT_THROW(run_trials(mc, geo), std::invalid_argument);
    GeometryConfig bad;
    bad.radius = 0.0;
    EXPECT_THROW(run_trials(small_config({"NOMA"}), bad), std::invalid_argument);
}

TEST(ToCsv, Schema) {
    const McConfig mc = small_config({"NOMA", "TDMA-discrete(2)"}, 5, 9);
    const std::string csv = to_csv(run_trials(mc, GeometryConfig{}));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "scheme,user,avg_outage,trials,seed");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        ASSERT_EQ(cells.size(), 5u) << line;
        EXPECT_TRUE(cells[0] == "NOMA" || cells[0] == "TDMA-discrete(2)");
        EXPECT_EQ(cells[3], "5");
        EXPECT_EQ(cells[4], "9");
        const double v = std::stod(cells[2]);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        // round-trips exactly
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        EXPECT_EQ(cells[2], buf);
    }
    EXPECT_EQ(rows, 2 * 6);
}

TEST(PairwiseSum, MatchesExactSumOfIntegers) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
    EXPECT_EQ(pairwise_sum(v), 999.0 * 1000.0 / 2.0);
    EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(PerTrial, SchemeDominance) {
    const McConfig mc = small_config({"NOMA", "TDMA-PARA", "TDMA-discrete(1)", "TDMA-discrete(2)", "TDMA-discrete(4)",
                                      "NOMA-R(2)", "NOMA-O(2)", "NOMA-R(3)-PA", "NOMA-O(3)-PA"},
                                     120);
    for (const auto& t : run_trial_outcomes(mc, GeometryConfig{})) {
        const auto& a0 = t.a0;
        EXPECT_GE(min_wsp_of(t.exponents[0], t.scenario), min_wsp_of(t.exponents[1], t.scenario) - 1e-12);
        EXPECT_LE(a0[3], a0[2] * (1 + 1e-12));
        EXPECT_LE(a0[4], a0[3] * (1 + 1e-12));
        EXPECT_LE(a0[6], a0[5] * (1 + 1e-9));
        EXPECT_LE(a0[8], a0[7] * (1 + 1e-9));
        EXPECT_LE(a0[0], a0[6] * (1 + 1e-9));
    }
}

TEST(PerTrial, VirtualUsersAreExcluded) {
    McConfig mc = small_config({"NOMA-R(4)", "NOMA-O(4)-PA"}, 10);
    mc.k = 5;
    const auto outcomes = run_trial_outcomes(mc, GeometryConfig{});
    for (const auto& t : outcomes)
        for (const auto& e : t.exponents) EXPECT_EQ(e.size(), 5u);
}

TEST(RequiredSnr, SingleUserUnitBalance) {
    const SnrCurve curve{0.0, {{1.0}}};
    const RequiredSnr r = required_snr(curve, 1.0 - std::exp(-1.0), 1e-9);
    EXPECT_NEAR(r.snr_db, 0.0, 1e-9);
    EXPECT_LE(r.hi_db - r.lo_db, 1e-9);
}

TEST(RequiredSnr, DoublingSnrHalvesLogSuccess) {
    const SnrCurve curve{3.0, {{0.7, 1.3}, {0.2, 2.5}}};
    const double ratio = 10.0 * std::log10(2.0);
    for (std::size_t user : {1, 2}) {
        const double before = std::log1p(-average_outage(SnrCurve{3.0, {{curve.exponents[0][user - 1]}}}, 3.0, 1));
        const double after =
            std::log1p(-average_outage(SnrCurve{3.0, {{curve.exponents[0][user - 1]}}}, 3.0 + ratio, 1));
        EXPECT_NEAR(after / before, 0.5, 1e-14);
    }
}

TEST(RequiredSnr, CachedExponentsMatchDirectRuns) {
    const McConfig mc = small_config({"NOMA-R(2)"}, 30);
    GeometryConfig geo;
    const SnrCurve curve = snr_curve(mc.schemes[0], mc, geo);
    for (double snr : {5.0, 15.0, 27.5}) {
        GeometryConfig at = geo;
        at.snr_db = snr;
        const McSummary direct = run_trials(mc, at);
        for (std::size_t k = 1; k <= mc.k; ++k)
            EXPECT_NEAR(average_outage(curve, snr, k), direct.avg_outage[0][k - 1], 1e-12);
    }
}

TEST(RequiredSnr, HitsTheTargetOnARerun) {
    McConfig mc = small_config({"TDMA-PARA"}, 50);
    GeometryConfig geo;
    const RequiredSnr r = required_snr(mc.schemes[0], mc, geo, 0.1, 1e-6, 1);
    geo.snr_db = r.snr_db;
    EXPECT_NEAR(run_trials(mc, geo).avg_outage[0][0], 0.1, 1e-5);
    EXPECT_NEAR(r.avg_outage, 0.1, 1e-5);
}

TEST(RequiredSnr, UnreachableTargetIsAnError) {
    const SnrCurve curve{0.0, {{std::numeric_limits<double>::infinity()}}};
    EXPECT_THROW(required_snr(curve, 0.1, 0.01), std::runtime_error);
    EXPECT_THROW(required_snr(SnrCurve{0.0, {{1.0}}}, 1.5, 0.01), std::invalid_argument);
}

TEST(RequiredSnr, NomaNeedsLeastPower) {
    for (double r_sum : {2.0, 3.0, 4.0}) {
        McConfig mc = small_config({"NOMA", "TDMA-PARA", "TDMA-PA"}, 300);
        mc.k = 10;
        mc.r_sum = r_sum;
        const GeometryConfig geo;
        double prev = -1e300;
        for (const auto& s : mc.schemes) {
            const double snr = required_snr(s, mc, geo, 0.1, 0.01, 1).snr_db;
            EXPECT_GE(snr, prev) << s.name() << " at r_sum " << r_sum;
            prev = snr;
        }
    }
}
