#pragma once

#include "srpsim/identity/keyring.hpp"
#include "srpsim/qos/metric.hpp"
#include "srpsim/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srpsim::srp {

// A route accepted by a source.
struct RouteRecord {
    NodeId src;
    NodeId dst;
    QueryId qid;
    std::vector<NodeId> route;          // {S, V_1, ..., V_{n-1}, T}
    Time t1 = 0;                        // RREQ transmission
    Time t2 = 0;                        // RREP acceptance
    bool augmented = false;
    std::vector<qos::Metric> metrics;   // reported, link (S, V_1) first
    identity::Authenticator auth;

    std::size_t link_count() const noexcept { return route.empty() ? 0 : route.size() - 1; }
    bool operator==(const RouteRecord&) const = default;
};

// Trace line for an acceptance. Times use round-trip precision so a stored
// trace can be re-verified exactly.
std::string format_accept(const RouteRecord& record);
// Parses a line written by format_accept (with the leading time and node
// columns). Returns nothing for other lines.
std::optional<RouteRecord> parse_accept(std::string_view line);

}  // namespace srpsim::srp
