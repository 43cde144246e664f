#pragma once

// nlohmann::json bindings. Decoding orders and partitions use 1-based user
// indices on the wire.

#include "noma/grouping.hpp"
#include "noma/intergroup.hpp"
#include "noma/model.hpp"

#include <nlohmann/json.hpp>

namespace noma {

void to_json(nlohmann::json& j, const UserStats& u);
void from_json(const nlohmann::json& j, UserStats& u);

void to_json(nlohmann::json& j, const Scenario& s);
void from_json(const nlohmann::json& j, Scenario& s);

void to_json(nlohmann::json& j, const AllocationResult& r);

// [[1,3],[2,4]]
void to_json(nlohmann::json& j, const GroupPartition& p);
GroupPartition partition_from_json(const nlohmann::json& j);

// {partition, t, p, a0, per_group: [AllocationResult]}
void to_json(nlohmann::json& j, const GroupPlan& plan);

}  // namespace noma
