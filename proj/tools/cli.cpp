#include "cli.hpp"

#include "noma/closed_form.hpp"
#include "noma/grouping.hpp"
#include "noma/intergroup.hpp"
#include "noma/json.hpp"
#include "noma/oracle.hpp"
#include "noma/sim.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace noma::cli {

namespace {

// Thrown for anything the user got wrong; maps to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Io {
    std::istream& in;
    std::ostream& out;
    std::ostream& err;
};

template <class F>
auto checked_input(F&& f) {
    try {
        return f();
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(e.what());
    }
}

template <class F>
auto checked_solve(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw SolverError(e.what());
    }
}

std::string read_all(const std::string& path, std::istream& in) {
    if (path.empty() || path == "-")
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Scenario read_scenario(const std::string& path, std::istream& in) {
    const std::string text = read_all(path, in);
    return checked_input([&] {
        const auto j = nlohmann::json::parse(text);
        Scenario s = j.get<Scenario>();
        validate(s);
        return s;
    });
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw InputError("cannot write " + path);
    f << text;
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// 1-based, ';'-separated so the CSV cell needs no quoting.
std::string format_order(const DecodingOrder& order) {
    std::string s;
    for (std::size_t i = 0; i < order.size(); ++i) s += (i ? ";" : "") + std::to_string(order[i] + 1);
    return s;
}

std::vector<sim::Scheme> parse_schemes(const std::vector<std::string>& names) {
    std::vector<sim::Scheme> out;
    for (const auto& n : names) out.push_back(checked_input([&] { return sim::Scheme::parse(n); }));
    return out;
}

struct SolverFlags {
    double eps_outer = SolverConfig{}.eps_outer;
    double eps_inner = SolverConfig{}.eps_inner;
    int t_discrete = 0;

    void add(CLI::App& app, bool with_discrete) {
        app.add_option("--eps-outer", eps_outer, "Outer bisection tolerance")->capture_default_str();
        app.add_option("--eps-inner", eps_inner, "Inner Newton tolerance")->capture_default_str();
        if (with_discrete)
            app.add_option("--t-discrete", t_discrete, "Sub-slots per timeslot (0 = continuous time)")
                ->capture_default_str();
    }

    SolverConfig config() const {
        SolverConfig c;
        c.eps_outer = eps_outer;
        c.eps_inner = eps_inner;
        c.discrete_t = t_discrete;
        checked_input([&] {
            c.validate();
            return 0;
        });
        return c;
    }
};

struct ExperimentFlags {
    std::uint64_t seed = 1;
    std::size_t trials = 5000;
    std::size_t k = 10;
    double snr_db = 15.0;
    double eta = 3.75;
    double radius = 1.0;
    std::vector<std::string> schemes{"NOMA", "TDMA-PARA", "TDMA-PA"};

    void add(CLI::App& app) {
        app.add_option("--seed", seed, "Master seed")->capture_default_str();
        app.add_option("--trials", trials, "Number of Monte-Carlo trials")->capture_default_str();
        app.add_option("--k", k, "Users per trial")->capture_default_str();
        app.add_option("--snr-db", snr_db, "Transmit SNR P/N0 in dB")->capture_default_str();
        app.add_option("--eta", eta, "Pathloss exponent")->capture_default_str();
        app.add_option("--radius", radius, "Cell radius")->capture_default_str();
        app.add_option("--scheme", schemes, "Scheme, repeatable (NOMA, TDMA-PARA, NOMA-O(2)-PA, ...)");
    }

    sim::GeometryConfig geometry() const {
        sim::GeometryConfig g{radius, eta, snr_db};
        checked_input([&] {
            g.validate();
            return 0;
        });
        return g;
    }

    sim::McConfig mc(double r_sum, const SolverConfig& solver) const {
        sim::McConfig c;
        c.trials = trials;
        c.k = k;
        c.r_sum = r_sum;
        c.schemes = parse_schemes(schemes);
        c.seed = seed;
        c.solver = solver;
        checked_input([&] {
            c.validate();
            return 0;
        });
        return c;
    }
};

int run_solve(const std::string& in_path, const std::string& out_path, Io io) {
    const Scenario s = read_scenario(in_path, io.in);
    const AllocationResult r = checked_solve([&] { return closed_form::solve(s); });
    emit(out_path, nlohmann::json(r).dump(2) + "\n", io.out);
    return kExitOk;
}

struct VerifyFlags {
    bool table1 = false;
    std::string in;
    int steps = 200;
    std::optional<double> outage_tol;  // per-user outage check is opt-in
    double paf_tol = 1e-2;
    double wsp_tol = 2e-3;
    double snr_db = 10.0;
};

int run_verify(const VerifyFlags& f, const std::string& format, const std::string& out_path, Io io) {
    std::vector<sim::NamedScenario> cases;
    if (f.table1) {
        cases = sim::table1_scenarios(f.snr_db);
    } else {
        Scenario s = read_scenario(f.in, io.in);
        if (s.size() > oracle::kMaxUsers)
            throw InputError("verify supports at most " + std::to_string(oracle::kMaxUsers) + " users");
        cases.push_back({"input", std::move(s)});
    }
    if (f.steps < 1) throw InputError("--steps must be positive");

    bool all_ok = true;
    std::ostringstream csv;
    nlohmann::json rows = nlohmann::json::array();
    csv << "case,closed_form_order,grid_order,min_wsp_gap,max_paf_diff,max_outage_diff,agree\n";
    for (const auto& c : cases) {
        const auto cf = checked_solve([&] { return closed_form::solve(c.scenario); });
        oracle::GridSpec grid;
        grid.steps = f.steps;
        const auto best = checked_solve([&] { return oracle::grid_search(c.scenario, grid); });
        const Evaluation ev = evaluate(c.scenario, best.order, best.pafs);
        double d_out = 0.0;
        double d_paf = 0.0;
        for (std::size_t k = 0; k < c.scenario.size(); ++k) {
            d_out = std::max(d_out, std::abs(cf.outage[k] - ev.outage[k]));
            d_paf = std::max(d_paf, std::abs(cf.pafs[k] - best.pafs[k]));
        }
        // The lattice approaches the optimum from below.
        const double gap = cf.min_wsp() - best.min_wsp;
        const bool ok = cf.order == best.order && d_paf <= f.paf_tol && gap >= -1e-12 && gap <= f.wsp_tol &&
                        (!f.outage_tol || d_out <= *f.outage_tol);
        all_ok = all_ok && ok;
        csv << c.name << ',' << format_order(cf.order) << ',' << format_order(best.order) << ',' << g17(gap) << ','
            << g17(d_paf) << ',' << g17(d_out) << ',' << (ok ? "yes" : "no") << '\n';
        rows.push_back({{"case", c.name},
                        {"closed_form", cf},
                        {"grid_order", nlohmann::json(best.order.perm)},
                        {"grid_pafs", best.pafs.pafs},
                        {"grid_outage", ev.outage},
                        {"min_wsp_gap", gap},
                        {"max_outage_diff", d_out},
                        {"max_paf_diff", d_paf},
                        {"agree", ok}});
    }
    if (format == "json") {
        for (auto& r : rows)
            for (auto& k : r["grid_order"]) k = k.get<std::size_t>() + 1;
        emit(out_path, rows.dump(2) + "\n", io.out);
    } else {
        emit(out_path, csv.str(), io.out);
    }
    if (!all_ok) io.err << "closed form and grid search disagree\n";
    return all_ok ? kExitOk : kExitMismatch;
}

int run_mc(const ExperimentFlags& ex, double r_sum, const SolverFlags& sf, const std::string& format,
           const std::string& out_path, Io io) {
    const auto geometry = ex.geometry();
    const auto mc = ex.mc(r_sum, sf.config());
    const auto summary = checked_solve([&] { return sim::run_trials(mc, geometry); });
    if (format == "json") {
        nlohmann::json j{{"trials", summary.trials}, {"seed", summary.seed}, {"k", mc.k},
                         {"r_sum", r_sum}, {"snr_db", geometry.snr_db}};
        j["schemes"] = nlohmann::json::array();
        for (std::size_t s = 0; s < summary.schemes.size(); ++s)
            j["schemes"].push_back({{"scheme", summary.schemes[s].name()}, {"avg_outage", summary.avg_outage[s]}});
        emit(out_path, j.dump(2) + "\n", io.out);
    } else {
        emit(out_path, sim::to_csv(summary), io.out);
    }
    return kExitOk;
}

int run_sweep(const ExperimentFlags& ex, const std::vector<double>& r_sums, const SolverFlags& sf, double target,
              double tol_db, std::size_t user, const std::string& format, const std::string& out_path, Io io) {
    if (!(target > 0.0 && target < 1.0)) throw InputError("--target must lie in (0, 1)");
    if (!(tol_db > 0.0)) throw InputError("--tol-db must be positive");
    if (user > ex.k) throw InputError("--user exceeds --k");
    const auto geometry = ex.geometry();

    std::ostringstream csv;
    csv << "scheme,rsum,required_snr_db,avg_outage,target,user,trials,seed\n";
    nlohmann::json rows = nlohmann::json::array();
    for (double r_sum : r_sums) {
        const auto mc = ex.mc(r_sum, sf.config());
        for (const auto& scheme : mc.schemes) {
            const auto r = checked_solve([&] {
                const auto curve = sim::snr_curve(scheme, mc, geometry);
                return sim::required_snr(curve, target, tol_db, user);
            });
            csv << scheme.name() << ',' << g17(r_sum) << ',' << g17(r.snr_db) << ',' << g17(r.avg_outage) << ','
                << g17(target) << ',' << user << ',' << mc.trials << ',' << mc.seed << '\n';
            rows.push_back({{"scheme", scheme.name()}, {"rsum", r_sum}, {"required_snr_db", r.snr_db},
                            {"avg_outage", r.avg_outage}, {"target", target}, {"user", user},
                            {"trials", mc.trials}, {"seed", mc.seed}});
        }
    }
    emit(out_path, format == "json" ? rows.dump(2) + "\n" : csv.str(), io.out);
    return kExitOk;
}

struct GroupFlags {
    std::string in;
    std::size_t l = 2;
    std::string grouping = "random";
    std::string mode = "PARA";
    std::string partition;
    std::uint64_t seed = 1;
};

int run_group(const GroupFlags& g, const SolverFlags& sf, const std::string& out_path, Io io) {
    const Scenario s = read_scenario(g.in, io.in);
    const SolverConfig config = sf.config();
    if (g.l < 1) throw InputError("--l must be at least 1");
    AllocationMode mode;
    if (sf.t_discrete > 0) mode = AllocationMode::discrete(sf.t_discrete);
    else if (g.mode == "PA") mode = AllocationMode::power_only();
    else if (g.mode == "PARA") mode = AllocationMode::continuous();
    else throw InputError("--mode must be PA or PARA");

    const std::size_t padded = pad_virtual_users(s, g.l).scenario.size();
    GroupPartition partition;
    if (!g.partition.empty()) {
        partition = checked_input([&] { return partition_from_json(nlohmann::json::parse(g.partition)); });
        if (partition.user_count() != padded || partition.group_size != g.l)
            throw InputError("--partition does not match the scenario and --l");
    } else if (g.grouping == "random") {
        partition = random_partition(padded, g.l, g.seed);
    } else if (g.grouping == "optimal") {
        partition = checked_solve([&] { return optimal_partition(s, g.l, mode, config).partition; });
    } else {
        throw InputError("--grouping must be random or optimal");
    }
    partition.virtual_count = padded - s.size();

    const GroupPlan plan = checked_solve([&] { return allocate(partition, s, mode, config); });
    nlohmann::json j{{"grouping", g.partition.empty() ? g.grouping : "given"},
                     {"mode", mode.name()},
                     {"group_size", g.l},
                     {"virtual_users", partition.virtual_count},
                     {"plan", plan}};
    nlohmann::json outage = nlohmann::json::array();
    for (double v : plan_outage(plan, s)) outage.push_back(v);
    j["outage"] = outage;
    emit(out_path, j.dump(2) + "\n", io.out);
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    Io io{in, out, err};
    CLI::App app{"Max-min fair NOMA power and resource allocation"};
    app.require_subcommand(1);
    std::string out_path;
    std::string format = "csv";
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", out_path, "Write output here instead of stdout"); };
    auto add_format = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    };

    std::string solve_in;
    auto* solve = app.add_subcommand("solve", "Closed-form allocation for one scenario (JSON in, JSON out)");
    solve->add_option("--in", solve_in, "Scenario JSON file (default stdin)");
    add_out(solve);

    VerifyFlags vf;
    auto* verify = app.add_subcommand("verify", "Compare the closed form against exhaustive grid search");
    auto* t1 = verify->add_flag("--table1", vf.table1, "Use the five built-in K=3 verification scenarios");
    verify->add_option("--in", vf.in, "Scenario JSON file (default stdin)")->excludes(t1);
    verify->add_option("--steps", vf.steps, "Grid steps per unit of power")->capture_default_str();
    verify->add_option("--paf-tol", vf.paf_tol, "Largest accepted PAF difference")->capture_default_str();
    verify->add_option("--wsp-tol", vf.wsp_tol, "Largest accepted min-WSP shortfall of the grid")->capture_default_str();
    verify->add_option("--outage-tol", vf.outage_tol, "Also require per-user outage agreement");
    verify->add_option("--snr-db", vf.snr_db, "Transmit SNR for --table1")->capture_default_str();
    add_out(verify);
    add_format(verify);

    ExperimentFlags ex;
    SolverFlags sf;
    std::vector<double> r_sums;

    auto* mc = app.add_subcommand("mc", "Monte-Carlo average outage per scheme and user");
    ex.add(*mc);
    sf.add(*mc, false);
    mc->add_option("--rsum", r_sums, "Sum of target rates")->expected(1);
    add_out(mc);
    add_format(mc);

    double target = 0.1;
    double tol_db = 0.01;
    std::size_t user = 1;
    auto* sweep = app.add_subcommand("snr-sweep", "Transmit SNR needed to reach a target average outage");
    ex.add(*sweep);
    sf.add(*sweep, false);
    sweep->add_option("--rsum", r_sums, "Sum of target rates, repeatable");
    sweep->add_option("--target", target, "Target average outage")->capture_default_str();
    sweep->add_option("--tol-db", tol_db, "Bracket width at termination")->capture_default_str();
    sweep->add_option("--user", user, "1-based user to track (0 = all users)")->capture_default_str();
    add_out(sweep);
    add_format(sweep);

    GroupFlags gf;
    auto* group = app.add_subcommand("group", "Group users and allocate time and power across groups");
    group->add_option("--in", gf.in, "Scenario JSON file (default stdin)");
    group->add_option("--l", gf.l, "Users per group")->capture_default_str();
    group->add_option("--grouping", gf.grouping, "random or optimal")->capture_default_str();
    group->add_option("--mode", gf.mode, "PA or PARA")->capture_default_str();
    group->add_option("--partition", gf.partition, "Explicit partition as JSON, e.g. [[1,3],[2,4]]");
    group->add_option("--seed", gf.seed, "Seed for random grouping")->capture_default_str();
    sf.add(*group, true);
    add_out(group);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }

    try {
        if (*solve) return run_solve(solve_in, out_path, io);
        if (*verify) return run_verify(vf, format, out_path, io);
        if (*mc) return run_mc(ex, r_sums.empty() ? 3.0 : r_sums.front(), sf, format, out_path, io);
        if (*sweep) {
            if (r_sums.empty()) r_sums = {2.0, 3.0, 4.0};
            return run_sweep(ex, r_sums, sf, target, tol_db, user, format, out_path, io);
        }
        if (*group) return run_group(gf, sf, out_path, io);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cin, std::cout, std::cerr);
}

}  // namespace noma::cli
