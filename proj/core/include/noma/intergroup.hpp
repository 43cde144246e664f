#pragma once

#include "noma/grouping.hpp"
#include "noma/model.hpp"
#include "noma/solver_config.hpp"

#include <span>
#include <vector>

namespace noma {

// f(t) = t * sum_l (2^{r_l/t} - 1) (w_l/G_l) 2^{sum_{j<l} r_j/t}: a group's
// balance level times its power share, as a function of its time share.
// Users are taken in the given order; zero-rate users contribute nothing
// and are dropped. Strictly decreasing and strictly convex on t > 0 when
// the order is ascending in gamma_bar / weight.
class GroupFunction {
public:
    explicit GroupFunction(std::span<const UserStats> users);

    // Same, after putting the users in their optimal decoding order.
    static GroupFunction sorted(std::span<const UserStats> users);

    // True when no user has a positive rate; f, f' and f'' are then 0.
    bool empty() const { return coef_.empty(); }

    double value(double t) const;
    double slope(double t) const;
    double curvature(double t) const;

private:
    std::vector<double> coef_;         // w/Gamma per active user
    std::vector<double> rate_;         // r per active user
    std::vector<double> prefix_rate_;  // sum of r up to and including the user
};

double f_g(std::span<const UserStats> group, double t);
double f_g_prime(std::span<const UserStats> group, double t);
double f_g_second(std::span<const UserStats> group, double t);

struct InnerSolution {
    double t = 0.0;
    int iterations = 0;  // residual evaluations, bracketing included
};

// Root of f'(t) + lambda = 0 by Newton steps kept inside a sign-changing
// bracket; a step leaving the bracket is replaced by bisection. Optional
// [lo_hint, hi_hint] seeds the bracket and is widened if it does not
// straddle the root. Throws std::runtime_error when the cap is hit.
InnerSolution inner_solve(const GroupFunction& fn, double lambda, double eps_inner,
                          int max_iter = 100, double lo_hint = 0.0, double hi_hint = 0.0);

double inner_solve(std::span<const UserStats> group, double lambda, double eps_inner);

struct SolveStats {
    int outer_iterations = 0;
    int inner_iterations = 0;
};

struct GroupPlan {
    GroupPartition partition;
    std::vector<double> t;  // time share per group
    std::vector<double> p;  // power share per group
    double a0 = 0.0;
    double lambda = 0.0;  // time multiplier; 0 unless continuously optimized
    std::vector<AllocationResult> inner;  // per group, member-local indices
    SolveStats stats;
};

// Minimizes A_0 = sum_g f_g(t_g) over the time simplex by bisection on the
// multiplier of sum t = 1, then sets p_g = f_g(t_g) / A_0.
GroupPlan continuous_allocate(const GroupPartition& partition, const Scenario& scenario,
                              const SolverConfig& config = {});

// t_g = 1/G with optimized power shares.
GroupPlan equal_time_allocate(const GroupPartition& partition, const Scenario& scenario);

// t_g = n_g / (G*T) with integer n_g >= 1 chosen by marginal greedy, which
// is exact for separable convex objectives.
GroupPlan discrete_allocate(const GroupPartition& partition, const Scenario& scenario,
                            int units_per_slot, const SolverConfig& config = {});

GroupPlan allocate(const GroupPartition& partition, const Scenario& scenario,
                   const AllocationMode& mode, const SolverConfig& config = {});

// Orthogonal baseline: every user in its own group.
GroupPlan tdma_plan(const Scenario& scenario, const AllocationMode& mode,
                    const SolverConfig& config = {});

// Users of one group as seen by the solver: member indices beyond the
// scenario are virtual zero-rate users.
std::vector<UserStats> group_users(const GroupPartition& partition, std::size_t group,
                                   const Scenario& scenario);

// Per real user: A_0 / w_k (0 for zero-rate users), so that the outage is
// 1 - exp(-exponent) and the weighted success probability exp(-A_0).
std::vector<double> plan_exponents(const GroupPlan& plan, const Scenario& scenario);
std::vector<double> plan_outage(const GroupPlan& plan, const Scenario& scenario);

}  // namespace noma
