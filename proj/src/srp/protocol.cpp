#include "srpsim/srp/protocol.hpp"

#include <algorithm>

namespace srpsim::srp {

std::string_view to_string(DiscardReason reason) noexcept {
    switch (reason) {
        case DiscardReason::seen: return "seen";
        case DiscardReason::precursor_mismatch: return "precursor-mismatch";
        case DiscardReason::loop: return "loop";
        case DiscardReason::metric_length: return "metric-length";
        case DiscardReason::auth_fail: return "auth-fail";
        case DiscardReason::no_key: return "no-key";
        case DiscardReason::successor_mismatch: return "successor-mismatch";
        case DiscardReason::not_forwarded: return "not-forwarded";
        case DiscardReason::metric_inconsistent: return "metric-inconsistent";
        case DiscardReason::prefix_mismatch: return "prefix-mismatch";
        case DiscardReason::stale: return "stale";
        case DiscardReason::not_on_route: return "not-on-route";
        case DiscardReason::own_query: return "own-query";
    }
    return "?";
}

namespace {

Discard make(DiscardReason r, std::string step, std::string detail = {}) {
    return Discard{r, std::move(step), std::move(detail)};
}

bool extended_loop(NodeId a, const std::vector<NodeId>& mid, NodeId b) {
    std::vector<NodeId> seq;
    seq.reserve(mid.size() + 2);
    seq.push_back(a);
    seq.insert(seq.end(), mid.begin(), mid.end());
    seq.push_back(b);
    return has_duplicates(seq);
}

// 4.1 - 4.3 given the node's position; `key` selects the ForwardList.
std::optional<Discard> check_rrep_common(const NodeState& state, const Rrep& rrep, NodeId forwarder,
                                         const RrepPosition& pos, const QueryKey& key, const ProtocolParams& params,
                                         const MeasureFn& measure) {
    if (params.augmented && rrep.metric_list.size() != rrep.route.size() + 1) {
        return make(DiscardReason::metric_length, "4.2.2", "metric list does not cover every route link");
    }
    if (pos.successor != forwarder) {
        return make(DiscardReason::successor_mismatch, "4.1",
                    "successor=" + to_string(pos.successor) + " forwarder=" + to_string(forwarder));
    }
    const auto rec = state.relays.find(key);
    if (pos.successor != rrep.dst) {
        if (rec == state.relays.end() || !rec->second.forward_list.contains(forwarder)) {
            return make(DiscardReason::not_forwarded, "4.2", "forwarder=" + to_string(forwarder));
        }
        if (params.augmented) {
            const auto& note = rec->second.forward_list.at(forwarder);
            if (!note || *note != rrep.metric_list[pos.index]) {
                return make(DiscardReason::metric_inconsistent, "4.2",
                            "reported link metric differs from the overheard one");
            }
        }
    } else if (params.augmented) {
        const qos::Metric own = measure(rrep.dst);
        if (!qos::check_metric_consistency(own, rrep.metric_list[pos.index], params.epsilon, params.administrative)) {
            return make(DiscardReason::metric_inconsistent, "4.2.1",
                        "own=" + std::to_string(own) + " reported=" + std::to_string(rrep.metric_list[pos.index]));
        }
    }
    if (params.augmented && !pos.is_source) {
        if (rec == state.relays.end() || !rec->second.prefix_metric) {
            return make(DiscardReason::prefix_mismatch, "4.2.2", "no stored prefix metric");
        }
        const std::span<const qos::Metric> upstream(rrep.metric_list.data() + pos.index + 1,
                                                    rrep.metric_list.size() - pos.index - 1);
        const qos::Metric recomputed = qos::aggregate(params.kind, upstream);
        if (recomputed != *rec->second.prefix_metric) {
            return make(DiscardReason::prefix_mismatch, "4.2.2",
                        "stored=" + std::to_string(*rec->second.prefix_metric) +
                            " recomputed=" + std::to_string(recomputed));
        }
    }
    if (extended_loop(rrep.src, rrep.route, rrep.dst)) {
        return make(DiscardReason::loop, "4.3");
    }
    return std::nullopt;
}

}  // namespace

bool has_duplicates(const std::vector<NodeId>& ids) {
    std::vector<NodeId> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

std::optional<RrepPosition> rrep_position(NodeId self, const Rrep& rrep) {
    RrepPosition pos;
    if (self == rrep.src) {
        pos.is_source = true;
        pos.index = rrep.route.size();
        pos.successor = rrep.route.empty() ? rrep.dst : rrep.route.back();
        pos.predecessor = self;
        return pos;
    }
    auto it = std::find(rrep.route.begin(), rrep.route.end(), self);
    if (it == rrep.route.end()) return std::nullopt;
    pos.index = static_cast<std::size_t>(it - rrep.route.begin());
    pos.successor = pos.index == 0 ? rrep.dst : rrep.route[pos.index - 1];
    pos.predecessor = pos.index + 1 == rrep.route.size() ? rrep.src : rrep.route[pos.index + 1];
    return pos;
}

std::optional<Discard> check_rreq_intermediate(const NodeState& state, const Rreq& rreq, NodeId precursor,
                                               const ProtocolParams& params, bool check_seen) {
    if (check_seen && state.seen.contains(QueryKey{rreq.src, rreq.qid})) {
        return make(DiscardReason::seen, "2.2.1");
    }
    const NodeId expected = rreq.node_list.empty() ? rreq.src : rreq.node_list.back();
    if (expected != precursor) {
        return make(DiscardReason::precursor_mismatch, "2.2.2",
                    "last=" + to_string(expected) + " precursor=" + to_string(precursor));
    }
    if (extended_loop(rreq.src, rreq.node_list, state.self)) {
        return make(DiscardReason::loop, "2.2.3");
    }
    if (params.augmented && rreq.metric_list.size() != rreq.node_list.size()) {
        return make(DiscardReason::metric_length, "2.2.4.a",
                    "nodes=" + std::to_string(rreq.node_list.size()) +
                        " metrics=" + std::to_string(rreq.metric_list.size()));
    }
    return std::nullopt;
}

std::optional<Discard> check_rreq_destination(const NodeState& state, const Rreq& rreq, NodeId precursor,
                                              const ProtocolParams& params, const identity::Signer& signer) {
    if (state.seen.contains(QueryKey{rreq.src, rreq.qid})) {
        return make(DiscardReason::seen, "2.3.1");
    }
    const NodeId expected = rreq.node_list.empty() ? rreq.src : rreq.node_list.back();
    if (expected != precursor) {
        return make(DiscardReason::precursor_mismatch, "2.3.2",
                    "last=" + to_string(expected) + " precursor=" + to_string(precursor));
    }
    if (extended_loop(rreq.src, rreq.node_list, state.self)) {
        return make(DiscardReason::loop, "2.3.3");
    }
    if (params.augmented && rreq.metric_list.size() != rreq.node_list.size()) {
        return make(DiscardReason::metric_length, "2.3.4.a",
                    "nodes=" + std::to_string(rreq.node_list.size()) +
                        " metrics=" + std::to_string(rreq.metric_list.size()));
    }
    if (!signer.keys().holds(state.self, rreq.src)) {
        return make(DiscardReason::no_key, "2.3.4");
    }
    if (!signer.verify(state.self, rreq.src, query_fields(rreq.src, rreq.dst, rreq.qid), rreq.auth)) {
        return make(DiscardReason::auth_fail, "2.3.4");
    }
    return std::nullopt;
}

std::optional<Discard> check_rrep_intermediate(const NodeState& state, const Rrep& rrep, NodeId forwarder,
                                               const ProtocolParams& params, const MeasureFn& measure) {
    const auto pos = rrep_position(state.self, rrep);
    if (!pos || pos->is_source) return make(DiscardReason::not_on_route, "4.1", "receiver is not on the route");
    return check_rrep_common(state, rrep, forwarder, *pos, QueryKey{rrep.src, rrep.qid}, params, measure);
}

std::optional<Discard> check_rrep_source(const NodeState& state, const Rrep& rrep, NodeId forwarder,
                                         const ProtocolParams& params, const MeasureFn& measure,
                                         const identity::Signer& signer) {
    if (rrep.src != state.self) return make(DiscardReason::not_on_route, "4.1", "receiver is not the source");
    const auto active = state.active.find(rrep.dst);
    if (active == state.active.end()) {
        return make(DiscardReason::stale, "5.2", "no discovery under way for T=" + to_string(rrep.dst));
    }
    const Discovery& d = active->second;
    const auto pos = rrep_position(state.self, rrep);
    if (auto bad = check_rrep_common(state, rrep, forwarder, *pos, QueryKey{state.self, d.qid}, params, measure)) {
        return bad;
    }
    if (!signer.keys().holds(state.self, rrep.dst)) return make(DiscardReason::no_key, "4.5");
    const auto fields =
        reply_fields(state.self, rrep.dst, d.qid, rrep.route, params.augmented ? &rrep.metric_list : nullptr);
    if (!signer.verify(state.self, rrep.dst, fields, rrep.auth)) {
        return make(DiscardReason::auth_fail, "4.5", "current Q=" + std::to_string(d.qid.value));
    }
    return std::nullopt;
}

std::optional<Admission> observe_relay(NodeState& state, const Rreq& rreq, NodeId transmitter,
                                       const ProtocolParams& params, const MeasureFn& measure) {
    auto rec = state.relays.find(QueryKey{rreq.src, rreq.qid});
    if (rec == state.relays.end()) return std::nullopt;
    RelayRecord& r = rec->second;
    if (r.forward_list.contains(transmitter)) return std::nullopt;
    if (rreq.node_list.size() != r.node_list.size() + 1 || rreq.node_list.back() != transmitter ||
        !std::equal(r.node_list.begin(), r.node_list.end(), rreq.node_list.begin())) {
        return std::nullopt;
    }
    const bool at_source = rreq.src == state.self;
    Admission out;
    if (!params.augmented) {
        out.step = at_source ? "2.1.2" : "2.2.5";
        out.admitted = true;
        r.forward_list.emplace(transmitter, std::nullopt);
        return out;
    }
    out.step = at_source ? "2.1.1" : "2.2.5";
    if (rreq.metric_list.size() != r.metric_list.size() + 1 ||
        !std::equal(r.metric_list.begin(), r.metric_list.end(), rreq.metric_list.begin())) {
        out.detail = "metric list does not extend the relayed one";
        return out;
    }
    const qos::Metric own = measure(transmitter);
    const qos::Metric reported = rreq.metric_list.back();
    if (!qos::check_metric_consistency(own, reported, params.epsilon, params.administrative)) {
        out.detail = "own=" + std::to_string(own) + " reported=" + std::to_string(reported);
        return out;
    }
    out.admitted = true;
    r.forward_list.emplace(transmitter, reported);
    return out;
}

Rreq start_discovery(NodeState& state, NodeId target, Time now, Time reply_wait, const identity::Signer& signer) {
    const QueryId qid{state.next_qid};
    Rreq rreq;
    rreq.src = state.self;
    rreq.dst = target;
    rreq.qid = qid;
    rreq.auth = signer.sign(state.self, target, query_fields(state.self, target, qid));
    ++state.next_qid;
    const QueryKey key{state.self, qid};
    state.seen.insert(key);
    state.relays[key] = RelayRecord{{}, {}, state.self, {}, std::nullopt};
    state.active[target] = Discovery{target, qid, now, reply_wait, 0};
    return rreq;
}

void record_relay(NodeState& state, const Rreq& sent, NodeId precursor, const ProtocolParams& params) {
    const QueryKey key{sent.src, sent.qid};
    state.seen.insert(key);
    if (state.relays.contains(key)) return;
    RelayRecord rec{sent.node_list, sent.metric_list, precursor, {}, std::nullopt};
    if (params.augmented && !sent.metric_list.empty()) rec.prefix_metric = qos::aggregate(params.kind, sent.metric_list);
    state.relays.emplace(key, std::move(rec));
}

Rreq relay_rreq(NodeState& state, const Rreq& rreq, NodeId precursor, const ProtocolParams& params,
                std::optional<qos::Metric> own_metric) {
    Rreq out = rreq;
    out.node_list.push_back(state.self);
    if (params.augmented) out.metric_list.push_back(own_metric.value_or(0));
    record_relay(state, out, precursor, params);
    return out;
}

Rrep make_rrep(NodeState& state, const Rreq& rreq, const ProtocolParams& params,
               std::optional<qos::Metric> own_metric, const identity::Signer& signer) {
    state.seen.insert(QueryKey{rreq.src, rreq.qid});
    Rrep rrep;
    rrep.src = rreq.src;
    rrep.dst = rreq.dst;
    rrep.qid = rreq.qid;
    rrep.route.assign(rreq.node_list.rbegin(), rreq.node_list.rend());
    if (params.augmented) {
        std::vector<qos::Metric> ml = rreq.metric_list;
        ml.push_back(own_metric.value_or(0));
        rrep.metric_list.assign(ml.rbegin(), ml.rend());
    }
    rrep.auth = signer.sign(state.self, rreq.src,
                            reply_fields(rrep.src, rrep.dst, rrep.qid, rrep.route,
                                         params.augmented ? &rrep.metric_list : nullptr));
    return rrep;
}

std::vector<NodeId> full_route(const Rrep& rrep) {
    std::vector<NodeId> out;
    out.reserve(rrep.route.size() + 2);
    out.push_back(rrep.src);
    out.insert(out.end(), rrep.route.rbegin(), rrep.route.rend());
    out.push_back(rrep.dst);
    return out;
}

std::vector<qos::Metric> route_order_metrics(const Rrep& rrep) {
    return {rrep.metric_list.rbegin(), rrep.metric_list.rend()};
}

}  // namespace srpsim::srp
