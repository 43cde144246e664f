#include "noma/json.hpp"

#include <cmath>
#include <stdexcept>

namespace noma {

namespace {

std::vector<std::size_t> one_based(const std::vector<std::size_t>& v) {
    std::vector<std::size_t> out(v);
    for (auto& k : out) ++k;
    return out;
}

// JSON has no infinity; saturated values are written as null.
nlohmann::json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::json numbers(const std::vector<double>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

}  // namespace

void to_json(nlohmann::json& j, const UserStats& u) {
    j = nlohmann::json{{"gamma_bar", u.gamma_bar}, {"rate", u.rate}, {"weight", u.weight}};
}

void from_json(const nlohmann::json& j, UserStats& u) {
    j.at("gamma_bar").get_to(u.gamma_bar);
    j.at("rate").get_to(u.rate);
    j.at("weight").get_to(u.weight);
}

void to_json(nlohmann::json& j, const Scenario& s) {
    j = nlohmann::json{{"users", s.users}, {"snr_db", s.snr_db}};
}

void from_json(const nlohmann::json& j, Scenario& s) {
    j.at("users").get_to(s.users);
    s.snr_db = j.value("snr_db", 0.0);
}

void to_json(nlohmann::json& j, const AllocationResult& r) {
    j = nlohmann::json{{"order", one_based(r.order.perm)}, {"pafs", numbers(r.pafs.pafs)},
                       {"balance_a", number(r.balance_a)}, {"thresholds", numbers(r.thresholds)},
                       {"outage", numbers(r.outage)}, {"wsp", numbers(r.wsp)}};
}

void to_json(nlohmann::json& j, const GroupPartition& p) {
    j = nlohmann::json::array();
    for (const auto& g : p.groups) j.push_back(one_based(g));
}

GroupPartition partition_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("partition must be a non-empty list of groups");
    GroupPartition p;
    for (const auto& g : j) {
        std::vector<std::size_t> members;
        for (const auto& k : g) {
            const auto idx = k.get<std::size_t>();
            if (idx == 0) throw std::invalid_argument("partition indices are 1-based");
            members.push_back(idx - 1);
        }
        p.groups.push_back(std::move(members));
    }
    p.group_size = p.groups.front().size();
    validate(p);
    return p;
}

void to_json(nlohmann::json& j, const GroupPlan& plan) {
    j = nlohmann::json{{"partition", plan.partition}, {"t", numbers(plan.t)}, {"p", numbers(plan.p)},
                       {"a0", number(plan.a0)}, {"per_group", plan.inner}};
}

}  // namespace noma
