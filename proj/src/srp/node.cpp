#include "srpsim/srp/node.hpp"

#include "srpsim/errors.hpp"

#include <algorithm>

namespace srpsim::srp {

ReplyWaitPolicy ReplyWaitPolicy::defaults(Time tau, int max_hops) {
    const Time min = 4.0 * tau * std::max(1, max_hops);
    return ReplyWaitPolicy{min, 16.0 * min};
}

Time ReplyWaitPolicy::after_failure(Time previous) const { return std::clamp(2.0 * previous, min, max); }

void ReplyWaitPolicy::validate() const {
    if (!(min > 0)) throw InvalidArgument("reply_wait_min must be positive");
    if (max < min) throw InvalidArgument("reply_wait_max must not be below reply_wait_min");
}

SrpNode::SrpNode(NodeId self, ProtocolParams params, ReplyWaitPolicy policy, const identity::Signer& signer,
                 MeasureFn measure, std::vector<RouteRecord>* sink)
    : params_(params), policy_(policy), signer_(&signer), measure_(std::move(measure)), sink_(sink) {
    policy_.validate();
    state_.self = self;
}

void SrpNode::discard(sim::Engine& engine, const Discard& d) {
    engine.trace().step(engine.now(), state_.self, d.step, "discard",
                        std::string(to_string(d.reason)) + (d.detail.empty() ? "" : " " + d.detail));
}

void SrpNode::on_action(sim::Engine& engine, NodeId target) {
    if (state_.active.contains(target)) {
        ++state_.deferred[target];
        engine.trace().step(engine.now(), state_.self, "invoke", "deferred", "target=" + to_string(target));
        return;
    }
    start(engine, target);
}

void SrpNode::start(sim::Engine& engine, NodeId target) {
    auto rw_it = state_.next_reply_wait.find(target);
    const Time rw = rw_it == state_.next_reply_wait.end() ? policy_.min : rw_it->second;
    Rreq rreq;
    try {
        rreq = start_discovery(state_, target, engine.now(), rw, *signer_);
    } catch (const KeyAccessViolation&) {
        engine.trace().step(engine.now(), state_.self, "1.1", "abort", "no-key target=" + to_string(target));
        return;
    }
    engine.trace().step(engine.now(), state_.self, "1.1", "query",
                        "T=" + to_string(target) + " Q=" + std::to_string(rreq.qid.value));
    engine.bcast_l(state_.self, rreq);
    const std::uint64_t id = engine.set_timer(state_.self, rw);
    timers_[id] = TimerInfo{target, rreq.qid, false};
    engine.trace().step(engine.now(), state_.self, "1.2", "timer", "reply_wait=" + sim::format_time(rw));
}

void SrpNode::conclude(sim::Engine& engine, NodeId target) {
    const auto& d = state_.active.at(target);
    engine.trace().step(engine.now(), state_.self, "5.2", "conclude",
                        "T=" + to_string(target) + " Q=" + std::to_string(d.qid.value) +
                            " accepted=" + std::to_string(d.accepted));
    state_.active.erase(target);
    state_.next_reply_wait[target] = policy_.min;
    auto def = state_.deferred.find(target);
    if (def != state_.deferred.end() && def->second > 0) {
        --def->second;
        start(engine, target);
    }
}

void SrpNode::on_timer(sim::Engine& engine, std::uint64_t timer_id) {
    auto it = timers_.find(timer_id);
    if (it == timers_.end()) return;
    const TimerInfo info = it->second;
    timers_.erase(it);
    auto act = state_.active.find(info.target);
    if (act == state_.active.end() || act->second.qid != info.qid) return;
    if (info.conclude || act->second.accepted > 0) {
        conclude(engine, info.target);
        return;
    }
    const Time next = policy_.after_failure(act->second.reply_wait);
    engine.trace().step(engine.now(), state_.self, "5.1", "failure",
                        "T=" + to_string(info.target) + " Q=" + std::to_string(info.qid.value) +
                            " next_reply_wait=" + sim::format_time(next));
    state_.active.erase(act);
    state_.next_reply_wait[info.target] = next;
    start(engine, info.target);
}

void SrpNode::on_delivery(sim::Engine& engine, const sim::Delivery& d) {
    if (d.kind == sim::DeliveryKind::tunnel) return;
    if (const auto* rreq = std::get_if<Rreq>(&d.packet)) {
        if (auto adm = observe_relay(state_, *rreq, d.transmitter, params_, measure_)) {
            engine.trace().step(engine.now(), state_.self, adm->step, adm->admitted ? "forwardlist-add" : "forwardlist-reject",
                                "node=" + to_string(d.transmitter) + (adm->detail.empty() ? "" : " " + adm->detail));
        }
        if (d.kind == sim::DeliveryKind::overheard) return;
        handle_rreq(engine, *rreq, d.transmitter);
    } else {
        if (d.kind == sim::DeliveryKind::overheard) return;
        handle_rrep(engine, std::get<Rrep>(d.packet), d.transmitter);
    }
}

void SrpNode::handle_rreq(sim::Engine& engine, const Rreq& rreq, NodeId transmitter) {
    if (rreq.src == state_.self) {
        discard(engine, Discard{DiscardReason::own_query, "2.1", {}});
        return;
    }
    if (rreq.dst == state_.self) {
        if (auto bad = check_rreq_destination(state_, rreq, transmitter, params_, *signer_)) {
            discard(engine, *bad);
            return;
        }
        std::optional<qos::Metric> m;
        if (params_.augmented) m = measure_(transmitter);
        const Rrep rrep = make_rrep(state_, rreq, params_, m, *signer_);
        engine.trace().step(engine.now(), state_.self, "3.1", "reply",
                            "Q=" + std::to_string(rrep.qid.value) + " route=" + join_nodes(rrep.route));
        const NodeId next = rrep.route.empty() ? rrep.src : rrep.route.front();
        engine.trace().step(engine.now(), state_.self, "3.2", "send", "to=" + to_string(next));
        engine.send_l(state_.self, next, rrep);
        return;
    }
    if (auto bad = check_rreq_intermediate(state_, rreq, transmitter, params_)) {
        discard(engine, *bad);
        return;
    }
    std::optional<qos::Metric> m;
    if (params_.augmented) m = measure_(transmitter);
    const Rreq out = relay_rreq(state_, rreq, transmitter, params_, m);
    engine.trace().step(engine.now(), state_.self, "2.2.4", "relay", "nl=" + join_nodes(out.node_list));
    engine.bcast_l(state_.self, out);
}

void SrpNode::handle_rrep(sim::Engine& engine, const Rrep& rrep, NodeId transmitter) {
    if (rrep.src != state_.self) {
        if (auto bad = check_rrep_intermediate(state_, rrep, transmitter, params_, measure_)) {
            discard(engine, *bad);
            return;
        }
        const NodeId pred = rrep_position(state_.self, rrep)->predecessor;
        engine.trace().step(engine.now(), state_.self, "4.4", "relay", "to=" + to_string(pred));
        engine.send_l(state_.self, pred, rrep);
        return;
    }
    if (auto bad = check_rrep_source(state_, rrep, transmitter, params_, measure_, *signer_)) {
        discard(engine, *bad);
        return;
    }
    Discovery& d = state_.active.at(rrep.dst);
    ++d.accepted;
    RouteRecord rec;
    rec.src = state_.self;
    rec.dst = rrep.dst;
    rec.qid = d.qid;
    rec.route = full_route(rrep);
    rec.t1 = d.t1;
    rec.t2 = engine.now();
    rec.augmented = params_.augmented;
    if (params_.augmented) rec.metrics = route_order_metrics(rrep);
    rec.auth = rrep.auth;
    engine.trace().step(engine.now(), state_.self, "4.6", "accept", "route=" + join_nodes(rec.route));
    engine.trace().add(format_accept(rec));
    if (sink_ != nullptr) sink_->push_back(rec);
    if (d.accepted == 1) {
        const Time wait = std::max<Time>(0, d.t1 + policy_.min - engine.now());
        const std::uint64_t id = engine.set_timer(state_.self, wait);
        timers_[id] = TimerInfo{rrep.dst, d.qid, true};
    }
}

}  // namespace srpsim::srp
