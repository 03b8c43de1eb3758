#pragma once

#include "srpsim/identity/keyring.hpp"
#include "srpsim/qos/metric.hpp"
#include "srpsim/types.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace srpsim::srp {

struct Rreq {
    NodeId src;
    NodeId dst;
    QueryId qid;
    identity::Authenticator auth;
    std::vector<NodeId> node_list;
    std::vector<qos::Metric> metric_list;  // augmented mode only

    bool operator==(const Rreq&) const = default;
};

// route holds V_{n-1} .. V_1; metric_list (augmented) is reversed the same
// way, so metric_list[p] is the link from route[p] to its successor and the
// last entry is the link (S, V_1).
struct Rrep {
    NodeId src;
    NodeId dst;
    QueryId qid;
    std::vector<NodeId> route;
    std::vector<qos::Metric> metric_list;
    identity::Authenticator auth;

    bool operator==(const Rrep&) const = default;
};

using Packet = std::variant<Rreq, Rrep>;

// Fields covered by A = f_K(S, T, Q).
std::vector<std::uint8_t> query_fields(NodeId src, NodeId dst, QueryId qid);
// Fields covered by A' = f_K(S, T, Q, Route[, MetricList]).
std::vector<std::uint8_t> reply_fields(NodeId src, NodeId dst, QueryId qid, const std::vector<NodeId>& route,
                                       const std::vector<qos::Metric>* metric_list);

// Digest of the whole packet, for trace lines.
std::uint64_t packet_digest(const Packet& packet);

std::string describe(const Packet& packet);
std::string join_nodes(const std::vector<NodeId>& ids);
std::string join_metrics(const std::vector<qos::Metric>& values);

bool is_rreq(const Packet& p) noexcept;

}  // namespace srpsim::srp
