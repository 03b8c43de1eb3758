#pragma once

#include "srpsim/types.hpp"

#include <map>
#include <optional>
#include <vector>

namespace srpsim::sim {

// Unordered node pair, stored with lo < hi.
struct Edge {
    NodeId lo;
    NodeId hi;

    constexpr auto operator<=>(const Edge&) const = default;

    bool touches(NodeId n) const noexcept { return n == lo || n == hi; }
    NodeId other(NodeId n) const noexcept { return n == lo ? hi : lo; }
};

// Throws InvalidArgument when u == v.
Edge make_edge(NodeId u, NodeId v);

// Half-open [begin, end).
struct Interval {
    Time begin = 0;
    Time end = 0;

    bool contains(Time t) const noexcept { return begin <= t && t < end; }
};

enum class LinkState { down, up };

class LinkSchedule {
public:
    LinkSchedule() = default;
    LinkSchedule(Edge edge, std::vector<Interval> up_intervals);

    const Edge& edge() const noexcept { return edge_; }
    const std::vector<Interval>& up_intervals() const noexcept { return up_; }

    bool up_at(Time t) const noexcept;
    // Up at every instant of [from, to).
    bool up_throughout(Time from, Time to) const noexcept;
    // Up at some instant of the open interval (t1, t2).
    bool up_within(Time t1, Time t2) const noexcept;

    // Sorted, disjoint, non-empty intervals; every up and every down period
    // lasts at least one packet transmission time. Throws InvalidArgument.
    void validate(Time tx_time) const;

private:
    Edge edge_{};
    std::vector<Interval> up_;
};

// The set of link schedules; absent edges are down forever.
class Topology {
public:
    // Throws InvalidArgument on a duplicate edge.
    void add(LinkSchedule schedule);

    LinkState link_state(NodeId u, NodeId v, Time t) const;
    bool up_throughout(NodeId u, NodeId v, Time from, Time to) const;
    bool up_within(NodeId u, NodeId v, Time t1, Time t2) const;

    const LinkSchedule* find(NodeId u, NodeId v) const;
    // Nodes sharing a schedule with `n`, ascending. These are the only nodes
    // that can ever hear `n`.
    const std::vector<NodeId>& candidates(NodeId n) const;

    const std::map<Edge, LinkSchedule>& schedules() const noexcept { return schedules_; }

    void validate(Time tx_time) const;

private:
    std::map<Edge, LinkSchedule> schedules_;
    std::map<NodeId, std::vector<NodeId>> adjacency_;
};

}  // namespace srpsim::sim
