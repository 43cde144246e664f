#pragma once

#include "noma/model.hpp"
#include "noma/solver_config.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace noma {

// Disjoint cover of users {0..G*L-1} by G groups of L users. Indices at or
// above the real user count denote virtual (zero-rate) padding users.
struct GroupPartition {
    std::vector<std::vector<std::size_t>> groups;
    std::size_t group_size = 1;
    std::size_t virtual_count = 0;

    std::size_t group_count() const { return groups.size(); }
    std::size_t user_count() const { return groups.size() * group_size; }
    std::size_t real_count() const { return user_count() - virtual_count; }

    // Members ascending, groups ordered by their smallest member.
    void canonicalize();

    bool operator==(const GroupPartition&) const = default;
};

void validate(const GroupPartition& partition);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000;

struct PaddedScenario {
    Scenario scenario;
    std::size_t virtual_count = 0;
};

// Appends zero-rate users (gamma_bar 1, weight 1) until the user count is a
// multiple of `group_size`.
PaddedScenario pad_virtual_users(const Scenario& scenario, std::size_t group_size);

// Shuffle-then-chunk partition, canonicalized. group_size must divide users.
GroupPartition random_partition(std::size_t users, std::size_t group_size, std::uint64_t seed);

// Each user alone in its own group (the TDMA layout).
GroupPartition singleton_partition(std::size_t users);

// users! / ((L!)^G * G!), saturating at UINT64_MAX.
std::uint64_t partition_count(std::size_t users, std::size_t group_size);

// Yields every partition of {0..users-1} into equal blocks exactly once, in
// canonical form and lexicographic order.
class PartitionEnumerator {
public:
    PartitionEnumerator(std::size_t users, std::size_t group_size);

    std::optional<GroupPartition> next();

private:
    void fill_from(std::size_t level);
    bool advance(std::size_t level);
    GroupPartition current() const;

    std::size_t users_;
    std::size_t group_size_;
    // choice_[g] = positions (into the pool left after groups < g and after
    // removing the pool's smallest element) of the L-1 companions.
    std::vector<std::vector<std::size_t>> choice_;
    std::vector<std::vector<std::size_t>> pool_;
    bool started_ = false;
    bool done_ = false;
};

// Collects the full stream; throws when the count exceeds `cap`.
std::vector<GroupPartition> enumerate_partitions(std::size_t users, std::size_t group_size,
                                                 std::uint64_t cap = kDefaultEnumerationCap);

struct GroupingChoice {
    GroupPartition partition;
    double a0 = 0.0;
};

// Exhaustive search for the partition minimizing A_0 under `mode`. The
// scenario is padded with virtual users as needed; the returned partition
// records how many. Ties keep the first partition in enumeration order.
GroupingChoice optimal_partition(const Scenario& scenario, std::size_t group_size,
                                 const AllocationMode& mode, const SolverConfig& config = {},
                                 std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace noma
