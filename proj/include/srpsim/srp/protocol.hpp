#pragma once

#include "srpsim/identity/keyring.hpp"
#include "srpsim/qos/metric.hpp"
#include "srpsim/srp/messages.hpp"
#include "srpsim/types.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace srpsim::srp {

struct QueryKey {
    NodeId src;
    QueryId qid;

    constexpr auto operator<=>(const QueryKey&) const = default;
};

// What a node transmitted for one query, plus what it overheard afterwards.
struct RelayRecord {
    std::vector<NodeId> node_list;            // as transmitted; empty at the source
    std::vector<qos::Metric> metric_list;
    NodeId precursor;
    std::map<NodeId, std::optional<qos::Metric>> forward_list;  // metric annotation in augmented mode
    std::optional<qos::Metric> prefix_metric;                   // m_{S,k}; unset at the source
};

struct Discovery {
    NodeId target;
    QueryId qid;
    Time t1 = 0;
    Time reply_wait = 0;
    int accepted = 0;
};

struct NodeState {
    NodeId self;
    std::set<QueryKey> seen;
    std::map<QueryKey, RelayRecord> relays;
    std::map<NodeId, Discovery> active;      // by target
    std::map<NodeId, int> deferred;          // invocations waiting per target
    std::map<NodeId, Time> next_reply_wait;  // per target
    std::uint64_t next_qid = 1;
};

struct ProtocolParams {
    bool augmented = false;
    qos::GKind kind = qos::GKind::add;
    qos::Metric epsilon = 0;
    bool administrative = false;
};

// A node's own measurement of the link to a neighbour.
using MeasureFn = std::function<qos::Metric(NodeId neighbour)>;

enum class DiscardReason {
    seen,
    precursor_mismatch,
    loop,
    metric_length,
    auth_fail,
    no_key,
    successor_mismatch,
    not_forwarded,
    metric_inconsistent,
    prefix_mismatch,
    stale,
    not_on_route,
    own_query,
};

std::string_view to_string(DiscardReason reason) noexcept;

struct Discard {
    DiscardReason reason;
    std::string step;  // protocol step label, e.g. "2.2.2"
    std::string detail;
};

// Role of a node for an incoming RREP.
struct RrepPosition {
    bool is_source = false;
    std::size_t index = 0;  // position in Route; for the source, Route.size()
    NodeId successor;
    NodeId predecessor;     // meaningless at the source
};

std::optional<RrepPosition> rrep_position(NodeId self, const Rrep& rrep);

bool has_duplicates(const std::vector<NodeId>& ids);

// --- checks (pure; shared by correct nodes and by adversary observers) ---

// Steps 2.2.1 - 2.2.4.a.
std::optional<Discard> check_rreq_intermediate(const NodeState& state, const Rreq& rreq, NodeId precursor,
                                               const ProtocolParams& params, bool check_seen = true);
// Steps 2.3.1 - 2.3.4. Uses the signer to recompute A.
std::optional<Discard> check_rreq_destination(const NodeState& state, const Rreq& rreq, NodeId precursor,
                                              const ProtocolParams& params, const identity::Signer& signer);
// Steps 4.1 - 4.3 (plus 4.2.1 / 4.2.2 in augmented mode) at an intermediate node.
std::optional<Discard> check_rrep_intermediate(const NodeState& state, const Rrep& rrep, NodeId forwarder,
                                               const ProtocolParams& params, const MeasureFn& measure);
// Step 5.2 staleness, then 4.1 - 4.3, then 4.5 at the source.
std::optional<Discard> check_rrep_source(const NodeState& state, const Rrep& rrep, NodeId forwarder,
                                         const ProtocolParams& params, const MeasureFn& measure,
                                         const identity::Signer& signer);

// Overheard-relay admission (2.1.2 / 2.2.5, augmented 2.1.1 / 2.2.5).
// Returns the step label and whether the transmitter was admitted, or
// nothing when the overheard RREQ does not extend this node's relay.
struct Admission {
    std::string step;
    bool admitted = false;
    std::string detail;
};
std::optional<Admission> observe_relay(NodeState& state, const Rreq& rreq, NodeId transmitter,
                                       const ProtocolParams& params, const MeasureFn& measure);

// --- transitions ---

// Step 1.1: fresh Q, authenticator, empty lists; registers the discovery,
// the empty ForwardList and marks (S, Q) seen.
Rreq start_discovery(NodeState& state, NodeId target, Time now, Time reply_wait, const identity::Signer& signer);

// Step 2.2.4 (and 2.2.7): returns the relayed RREQ and records the relay.
// `own_metric` is the node's measurement of the link to the precursor.
Rreq relay_rreq(NodeState& state, const Rreq& rreq, NodeId precursor, const ProtocolParams& params,
                std::optional<qos::Metric> own_metric);

// Records a transmitted RREQ as this node's relay for (S, Q) unless one is
// already recorded. Used when the relayed list is not a plain append.
void record_relay(NodeState& state, const Rreq& sent, NodeId precursor, const ProtocolParams& params);

// Step 3: builds the RREP at T and marks (S, Q) seen.
Rrep make_rrep(NodeState& state, const Rreq& rreq, const ProtocolParams& params,
               std::optional<qos::Metric> own_metric, const identity::Signer& signer);

// The full route {S, V_1, ..., V_{n-1}, T} carried by an RREP.
std::vector<NodeId> full_route(const Rrep& rrep);
// Reported link metrics in route order (link (S,V_1) first).
std::vector<qos::Metric> route_order_metrics(const Rrep& rrep);

}  // namespace srpsim::srp
