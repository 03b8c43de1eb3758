#include "srpsim/sim/topology.hpp"

#include "srpsim/errors.hpp"

#include <algorithm>
#include <string>

namespace srpsim::sim {

Edge make_edge(NodeId u, NodeId v) {
    if (u == v) throw InvalidArgument("invalid edge: node " + to_string(u) + " paired with itself");
    return u < v ? Edge{u, v} : Edge{v, u};
}

LinkSchedule::LinkSchedule(Edge edge, std::vector<Interval> up_intervals)
    : edge_(edge), up_(std::move(up_intervals)) {}

bool LinkSchedule::up_at(Time t) const noexcept {
    return std::any_of(up_.begin(), up_.end(), [t](const Interval& iv) { return iv.contains(t); });
}

bool LinkSchedule::up_throughout(Time from, Time to) const noexcept {
    return std::any_of(up_.begin(), up_.end(),
                       [&](const Interval& iv) { return iv.begin <= from && to <= iv.end; });
}

bool LinkSchedule::up_within(Time t1, Time t2) const noexcept {
    // [a, b) meets (t1, t2) iff a < t2 and b > t1.
    return std::any_of(up_.begin(), up_.end(),
                       [&](const Interval& iv) { return iv.begin < t2 && iv.end > t1; });
}

void LinkSchedule::validate(Time tx_time) const {
    const std::string name = "link (" + to_string(edge_.lo) + "," + to_string(edge_.hi) + ")";
    for (std::size_t i = 0; i < up_.size(); ++i) {
        const auto& iv = up_[i];
        if (!(iv.begin < iv.end)) {
            throw InvalidArgument(name + ": interval " + std::to_string(i) + " is empty or reversed");
        }
        if (iv.end - iv.begin < tx_time) {
            throw InvalidArgument(name + ": interval " + std::to_string(i) +
                                  " is shorter than one packet transmission time");
        }
        if (i > 0) {
            const auto& prev = up_[i - 1];
            if (iv.begin < prev.end) {
                throw InvalidArgument(name + ": intervals " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                      " overlap or are unsorted");
            }
            if (iv.begin - prev.end < tx_time) {
                throw InvalidArgument(name + ": down period before interval " + std::to_string(i) +
                                      " is shorter than one packet transmission time");
            }
        }
    }
}

void Topology::add(LinkSchedule schedule) {
    const Edge e = schedule.edge();
    if (e.lo == e.hi) throw InvalidArgument("invalid edge: self loop");
    if (schedules_.contains(e)) {
        throw InvalidArgument("duplicate schedule for link (" + to_string(e.lo) + "," + to_string(e.hi) + ")");
    }
    schedules_.emplace(e, std::move(schedule));
    for (auto [a, b] : {std::pair{e.lo, e.hi}, std::pair{e.hi, e.lo}}) {
        auto& adj = adjacency_[a];
        adj.insert(std::lower_bound(adj.begin(), adj.end(), b), b);
    }
}

const LinkSchedule* Topology::find(NodeId u, NodeId v) const {
    auto it = schedules_.find(make_edge(u, v));
    return it == schedules_.end() ? nullptr : &it->second;
}

LinkState Topology::link_state(NodeId u, NodeId v, Time t) const {
    const auto* s = find(u, v);
    return s != nullptr && s->up_at(t) ? LinkState::up : LinkState::down;
}

bool Topology::up_throughout(NodeId u, NodeId v, Time from, Time to) const {
    const auto* s = find(u, v);
    return s != nullptr && s->up_throughout(from, to);
}

bool Topology::up_within(NodeId u, NodeId v, Time t1, Time t2) const {
    const auto* s = find(u, v);
    return s != nullptr && s->up_within(t1, t2);
}

const std::vector<NodeId>& Topology::candidates(NodeId n) const {
    static const std::vector<NodeId> kNone;
    auto it = adjacency_.find(n);
    return it == adjacency_.end() ? kNone : it->second;
}

void Topology::validate(Time tx_time) const {
    for (const auto& [edge, schedule] : schedules_) schedule.validate(tx_time);
}

}  // namespace srpsim::sim
