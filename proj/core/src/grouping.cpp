#include "noma/grouping.hpp"

#include "noma/intergroup.hpp"
#include "noma/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noma {

namespace {

void require_divisible(std::size_t users, std::size_t group_size) {
    if (group_size == 0) throw std::invalid_argument("group size must be at least 1");
    if (users == 0) throw std::invalid_argument("no users to partition");
    if (users % group_size != 0)
        throw std::invalid_argument("group size " + std::to_string(group_size) + " does not divide " +
                                    std::to_string(users) + " users; pad with virtual users first");
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
    return a * b;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // c * (n-k+i) is divisible by i; split i across both factors.
        const std::uint64_t g = std::gcd(c, i);
        c = saturating_mul(c / g, (n - k + i) / (i / g));
        if (c == std::numeric_limits<std::uint64_t>::max()) return c;
    }
    return c;
}

}  // namespace

void GroupPartition::canonicalize() {
    for (auto& g : groups) std::sort(g.begin(), g.end());
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

void validate(const GroupPartition& partition) {
    if (partition.groups.empty()) throw std::invalid_argument("partition has no groups");
    if (partition.group_size == 0) throw std::invalid_argument("group size must be at least 1");
    const std::size_t n = partition.user_count();
    if (partition.virtual_count >= n) throw std::invalid_argument("partition has no real users");
    std::vector<bool> seen(n, false);
    for (const auto& g : partition.groups) {
        if (g.size() != partition.group_size) throw std::invalid_argument("groups must all have the same size");
        for (std::size_t k : g) {
            if (k >= n || seen[k]) throw std::invalid_argument("partition groups must be disjoint and cover all users");
            seen[k] = true;
        }
    }
}

PaddedScenario pad_virtual_users(const Scenario& scenario, std::size_t group_size) {
    if (group_size == 0) throw std::invalid_argument("group size must be at least 1");
    PaddedScenario out{scenario, 0};
    const std::size_t k = scenario.size();
    const std::size_t groups = (k + group_size - 1) / group_size;
    out.virtual_count = groups * group_size - k;
    out.scenario.users.insert(out.scenario.users.end(), out.virtual_count, UserStats{1.0, 0.0, 1.0});
    return out;
}

GroupPartition random_partition(std::size_t users, std::size_t group_size, std::uint64_t seed) {
    require_divisible(users, group_size);
    std::vector<std::size_t> perm(users);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    SplitMix64 rng(seed);
    shuffle(std::span<std::size_t>(perm), rng);

    GroupPartition out;
    out.group_size = group_size;
    for (std::size_t i = 0; i < users; i += group_size)
        out.groups.emplace_back(perm.begin() + static_cast<std::ptrdiff_t>(i),
                                perm.begin() + static_cast<std::ptrdiff_t>(i + group_size));
    out.canonicalize();
    return out;
}

GroupPartition singleton_partition(std::size_t users) {
    if (users == 0) throw std::invalid_argument("no users to partition");
    GroupPartition out;
    out.group_size = 1;
    for (std::size_t k = 0; k < users; ++k) out.groups.push_back({k});
    return out;
}

std::uint64_t partition_count(std::size_t users, std::size_t group_size) {
    require_divisible(users, group_size);
    // The smallest remaining user anchors each group; choose its companions.
    std::uint64_t count = 1;
    for (std::size_t left = users; left > 0; left -= group_size)
        count = saturating_mul(count, binomial(left - 1, group_size - 1));
    return count;
}

PartitionEnumerator::PartitionEnumerator(std::size_t users, std::size_t group_size)
    : users_(users), group_size_(group_size) {
    require_divisible(users, group_size);
    const std::size_t groups = users / group_size;
    choice_.resize(groups);
    pool_.resize(groups);
}

std::optional<GroupPartition> PartitionEnumerator::next() {
    if (done_) return std::nullopt;
    if (!started_) {
        started_ = true;
        pool_[0].resize(users_);
        std::iota(pool_[0].begin(), pool_[0].end(), std::size_t{0});
        choice_[0].resize(group_size_ - 1);
        std::iota(choice_[0].begin(), choice_[0].end(), std::size_t{0});
        fill_from(0);
        return current();
    }
    // The last group is forced, so only levels before it can advance.
    for (std::size_t level = choice_.size() - 1; level-- > 0;) {
        if (advance(level)) {
            fill_from(level);
            return current();
        }
    }
    done_ = true;
    return std::nullopt;
}

// Levels after `level` restart at their first companion combination.
void PartitionEnumerator::fill_from(std::size_t level) {
    for (std::size_t g = level + 1; g < choice_.size(); ++g) {
        const auto& prev = pool_[g - 1];
        std::vector<bool> taken(prev.size(), false);
        taken[0] = true;
        for (std::size_t c : choice_[g - 1]) taken[c + 1] = true;
        pool_[g].clear();
        for (std::size_t i = 0; i < prev.size(); ++i)
            if (!taken[i]) pool_[g].push_back(prev[i]);
        choice_[g].resize(group_size_ - 1);
        std::iota(choice_[g].begin(), choice_[g].end(), std::size_t{0});
    }
}

// Next (L-1)-combination of the pool minus its anchor, lexicographically.
bool PartitionEnumerator::advance(std::size_t level) {
    auto& c = choice_[level];
    const std::size_t n = pool_[level].size() - 1;
    const std::size_t m = c.size();
    for (std::size_t i = m; i-- > 0;) {
        if (c[i] < n - m + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

GroupPartition PartitionEnumerator::current() const {
    GroupPartition out;
    out.group_size = group_size_;
    out.groups.reserve(choice_.size());
    for (std::size_t g = 0; g < choice_.size(); ++g) {
        std::vector<std::size_t> members{pool_[g][0]};
        for (std::size_t c : choice_[g]) members.push_back(pool_[g][c + 1]);
        out.groups.push_back(std::move(members));
    }
    return out;
}

std::vector<GroupPartition> enumerate_partitions(std::size_t users, std::size_t group_size, std::uint64_t cap) {
    const std::uint64_t count = partition_count(users, group_size);
    if (count > cap)
        throw std::length_error(std::to_string(count) + " partitions exceed the enumeration cap of " +
                                std::to_string(cap) + "; use random_partition instead");
    std::vector<GroupPartition> out;
    out.reserve(static_cast<std::size_t>(count));
    PartitionEnumerator it(users, group_size);
    while (auto p = it.next()) out.push_back(std::move(*p));
    return out;
}

GroupingChoice optimal_partition(const Scenario& scenario, std::size_t group_size, const AllocationMode& mode,
                                 const SolverConfig& config, std::uint64_t cap) {
    validate(scenario);
    const PaddedScenario padded = pad_virtual_users(scenario, group_size);
    const std::size_t n = padded.scenario.size();
    const std::uint64_t count = partition_count(n, group_size);
    if (count > cap)
        throw std::length_error(std::to_string(count) + " partitions exceed the enumeration cap of " +
                                std::to_string(cap) + "; use random_partition instead");

    // Groups recur across partitions: cache each distinct group's function.
    std::map<std::vector<std::size_t>, GroupFunction> functions;
    auto function_of = [&](const std::vector<std::size_t>& members) -> const GroupFunction& {
        auto it = functions.find(members);
        if (it == functions.end()) {
            std::vector<UserStats> users;
            for (std::size_t k : members) users.push_back(padded.scenario.users[k]);
            it = functions.emplace(members, GroupFunction::sorted(users)).first;
        }
        return it->second;
    };

    const double groups = static_cast<double>(n / group_size);
    GroupingChoice best;
    best.a0 = std::numeric_limits<double>::infinity();
    bool have_best = false;

    // For PARA, weak duality prunes: for any lambda > 0,
    //   A_0(P) >= sum_g min_t [f_g(t) + lambda t] - lambda,
    // so a partition whose bound at the incumbent's multiplier already
    // reaches the incumbent's A_0 cannot be strictly better.
    double best_lambda = 0.0;
    std::map<std::vector<std::size_t>, double> dual_terms;  // valid for best_lambda
    auto dual_bound = [&](const GroupPartition& p) {
        double bound = -best_lambda;
        for (const auto& members : p.groups) {
            auto it = dual_terms.find(members);
            if (it == dual_terms.end()) {
                const GroupFunction& fn = function_of(members);
                double term = 0.0;
                if (!fn.empty()) {
                    const double t = inner_solve(fn, best_lambda, config.eps_inner, config.max_iter_inner).t;
                    term = fn.value(t) + best_lambda * t;
                }
                it = dual_terms.emplace(members, term).first;
            }
            bound += it->second;
        }
        return bound;
    };

    PartitionEnumerator it(n, group_size);
    while (auto candidate = it.next()) {
        candidate->virtual_count = padded.virtual_count;
        double a0 = 0.0;
        switch (mode.kind) {
            case AllocationMode::Kind::kPowerOnly:
                for (const auto& members : candidate->groups) {
                    const GroupFunction& fn = function_of(members);
                    if (!fn.empty()) a0 += fn.value(1.0 / groups);
                }
                break;
            case AllocationMode::Kind::kContinuous: {
                if (have_best && best_lambda > 0.0 && std::isfinite(best.a0) && dual_bound(*candidate) >= best.a0)
                    continue;
                const GroupPlan plan = continuous_allocate(*candidate, padded.scenario, config);
                a0 = plan.a0;
                if (!have_best || a0 < best.a0) {
                    best_lambda = plan.lambda;
                    dual_terms.clear();
                }
                break;
            }
            case AllocationMode::Kind::kDiscrete:
                a0 = discrete_allocate(*candidate, padded.scenario, mode.units_per_slot, config).a0;
                break;
        }
        if (!have_best || a0 < best.a0) {
            best.partition = std::move(*candidate);
            best.a0 = a0;
            have_best = true;
        }
    }
    return best;
}

}  // namespace noma
