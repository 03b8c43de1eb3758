#pragma once

#include "srpsim/identity/keyring.hpp"
#include "srpsim/qos/model.hpp"
#include "srpsim/sim/topology.hpp"
#include "srpsim/srp/route_record.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace srpsim::verify {

// First node that appears twice, if any.
std::optional<NodeId> repeated_node(const std::vector<NodeId>& route);

struct Freshness {
    bool fresh = true;
    std::vector<sim::Edge> never_up;  // links with no up interval inside (t1, t2)
};

// Every link of the route was up at some instant of (t1, t2).
Freshness check_fresh(const sim::Topology& topology, const std::vector<NodeId>& route, Time t1, Time t2);

struct WeakFreshness {
    bool weakly_fresh = true;
    // Witness for a weakly fresh route that is not fresh: links before j and
    // from k on are fresh and `detour` joins V_j to V_k over fresh links.
    int j = -1;
    int k = -1;
    std::vector<NodeId> detour;
};

// Fresh prefix {S..V_j}, fresh suffix {V_k..T} with 1 <= j < k <= n-1, and a
// path from V_j to V_k over links that were up within (t1, t2). Routes of at
// most two links are weakly fresh exactly when they are fresh.
WeakFreshness check_weakly_fresh(const sim::Topology& topology, const std::vector<NodeId>& route, Time t1, Time t2);

struct Accuracy {
    bool evaluable = false;  // false if some link has no actual value
    qos::Metric reported = 0;
    qos::Metric actual = 0;
    qos::Metric error = 0;  // reported - actual
    qos::Metric bound = 0;  // delta_good for this route length
    bool within = false;    // |error| < bound
};

Accuracy check_accuracy(const qos::LinkMetricModel& model, const std::vector<NodeId>& route,
                        const std::vector<qos::Metric>& reported);

struct Verdict {
    srp::RouteRecord record;
    std::optional<NodeId> loop;
    Freshness fresh;
    WeakFreshness weak;
    std::optional<Accuracy> accuracy;  // augmented routes only
    std::set<NodeId> auth_issuers;
    bool auth_from_destination = false;  // issuers is exactly {T}
    bool endpoints_faulty = false;       // S or T is an adversary

    bool loop_free() const noexcept { return !loop.has_value(); }
};

Verdict judge(const srp::RouteRecord& record, const sim::Topology& topology, const qos::LinkMetricModel* model,
              const identity::AuthLog& auth_log, const std::set<NodeId>& adversaries);

struct Summary {
    std::size_t accepted = 0;
    std::size_t endpoints_faulty = 0;
    std::size_t loop_free = 0;
    std::size_t fresh = 0;
    std::size_t weakly_fresh = 0;
    std::size_t auth_from_destination = 0;
    std::size_t accuracy_evaluated = 0;
    std::size_t accurate = 0;
    qos::Metric max_abs_error = 0;
};

// Counts over routes whose endpoints are both correct.
Summary summarize(const std::vector<Verdict>& verdicts);

std::string describe(const Verdict& v);

}  // namespace srpsim::verify
