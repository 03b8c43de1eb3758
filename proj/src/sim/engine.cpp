#include "srpsim/sim/engine.hpp"

#include "srpsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace srpsim::sim {

void SimConfig::validate() const {
    if (!(tau > 0)) throw InvalidArgument("tau must be positive");
    if (!(end_time > 0)) throw InvalidArgument("end_time must be positive");
    if (!(tx_time > 0)) throw InvalidArgument("tx_time must be positive");
    if (tx_time > tau) throw InvalidArgument("tx_time must not exceed tau");
    if (!(radius > 0)) throw InvalidArgument("radius must be positive");
}

std::string_view to_string(DeliveryKind kind) noexcept {
    switch (kind) {
        case DeliveryKind::broadcast: return "broadcast";
        case DeliveryKind::unicast: return "unicast";
        case DeliveryKind::overheard: return "overheard";
        case DeliveryKind::tunnel: return "tunnel";
    }
    return "?";
}

Engine::Engine(SimConfig config, const Topology& topology, std::size_t node_count, bool keep_trace_lines)
    : config_(config), topology_(&topology), agents_(node_count, nullptr), rng_(config.seed), trace_(keep_trace_lines) {
    config_.validate();
    topology.validate(config_.tx_time);
    for (const auto& [edge, schedule] : topology.schedules()) {
        if (edge.hi.value >= node_count) throw InvalidArgument("link references an undeclared node");
        for (const auto& iv : schedule.up_intervals()) {
            if (iv.begin <= config_.end_time) push(std::max<Time>(iv.begin, 0), LinkChange{edge, true});
            if (iv.end <= config_.end_time && iv.end >= 0) push(iv.end, LinkChange{edge, false});
        }
    }
}

void Engine::attach(NodeId node, Agent& agent) {
    check_node(node, "attach");
    agents_[node.value] = &agent;
}

void Engine::check_node(NodeId node, const char* what) const {
    if (node.value >= agents_.size()) {
        throw InvalidArgument(std::string(what) + ": unknown node " + srpsim::to_string(node));
    }
}

void Engine::push(Time at, Payload payload) {
    if (at < now_) throw OrderingError("event scheduled before the current time");
    queue_.push(Event{at, seq_++, std::move(payload)});
}

Time Engine::draw_delay() {
    // Uniform over (tx_time, tau]; the packet occupies the link for the
    // whole delay, which is never shorter than one transmission time.
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    if (config_.tau == config_.tx_time) return config_.tau;
    return config_.tau - u * (config_.tau - config_.tx_time);
}

void Engine::bcast_l(NodeId sender, const srp::Packet& packet) {
    check_node(sender, "bcast_l");
    const std::uint64_t digest = srp::packet_digest(packet);
    trace_.transmission(now_, sender, "Bcast_L", digest, "sent", srp::describe(packet));
    for (NodeId v : topology_->candidates(sender)) {
        const Time d = draw_delay();
        if (topology_->up_throughout(sender, v, now_, now_ + d)) {
            push(now_ + d, Delivery{next_delivery_++, DeliveryKind::broadcast, sender, v, v, sender, packet, now_});
        } else {
            trace_.transmission(now_, v, "Receive_L", digest, "dropped", "from=" + srpsim::to_string(sender));
        }
    }
}

void Engine::send_l(NodeId sender, NodeId receiver, const srp::Packet& packet) {
    check_node(sender, "send_l");
    check_node(receiver, "send_l");
    if (sender == receiver) throw InvalidArgument("send_l to self");
    const std::uint64_t digest = srp::packet_digest(packet);
    trace_.transmission(now_, sender, "Send_L", digest, "sent",
                        "to=" + srpsim::to_string(receiver) + " " + srp::describe(packet));
    const Time d = draw_delay();
    if (topology_->up_throughout(sender, receiver, now_, now_ + d)) {
        push(now_ + d,
             Delivery{next_delivery_++, DeliveryKind::unicast, sender, receiver, receiver, sender, packet, now_});
    } else {
        trace_.transmission(now_, receiver, "Receive_L", digest, "dropped", "from=" + srpsim::to_string(sender));
        push(now_ + config_.tau, FailureReport{sender, receiver, packet});
    }
    for (NodeId w : topology_->candidates(sender)) {
        if (w == receiver) continue;
        const Time dw = draw_delay();
        if (topology_->up_throughout(sender, w, now_, now_ + dw)) {
            push(now_ + dw, Delivery{next_delivery_++, DeliveryKind::overheard, sender, w, receiver, sender, packet, now_});
        }
    }
}

void Engine::tunnel_send(const std::vector<NodeId>& path, const srp::Packet& packet) {
    if (path.size() < 2) throw InvalidArgument("tunnel path needs at least two nodes");
    for (NodeId n : path) check_node(n, "tunnel_send");
    if (std::adjacent_find(path.begin(), path.end()) != path.end()) {
        throw InvalidArgument("tunnel path has a hop from a node to itself");
    }
    const std::uint64_t digest = srp::packet_digest(packet);
    trace_.transmission(now_, path.front(), "tunnel", digest, "sent",
                        "path=" + srp::join_nodes(path) + " " + srp::describe(packet));
    Time t = now_;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const Time d = draw_delay();
        if (!topology_->up_throughout(path[i], path[i + 1], t, t + d)) {
            trace_.transmission(now_, path.front(), "tunnel", digest, "lost",
                                "hop=" + srpsim::to_string(path[i]) + "-" + srpsim::to_string(path[i + 1]) +
                                    " at=" + format_time(t));
            return;
        }
        t += d;
    }
    const NodeId last = path[path.size() - 2];
    push(t, Delivery{next_delivery_++, DeliveryKind::tunnel, last, path.back(), path.back(), path.front(), packet, now_});
}

std::uint64_t Engine::set_timer(NodeId node, Time delay) {
    check_node(node, "set_timer");
    if (delay < 0 || !std::isfinite(delay)) throw OrderingError("timer delay must be finite and non-negative");
    const std::uint64_t id = next_timer_++;
    push(now_ + delay, TimerFire{node, id});
    return id;
}

void Engine::schedule_action(NodeId node, Time at, NodeId target) {
    check_node(node, "schedule_action");
    check_node(target, "schedule_action");
    push(at, NodeAction{node, target});
}

void Engine::run() {
    while (!queue_.empty()) {
        if (queue_.top().time > config_.end_time) break;
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.time;
        ++processed_;
        dispatch(ev);
    }
}

void Engine::dispatch(const Event& ev) {
    if (const auto* d = std::get_if<Delivery>(&ev.payload)) {
        const char* prim = d->kind == DeliveryKind::overheard ? "overhear"
                           : d->kind == DeliveryKind::tunnel  ? "tunnel"
                                                              : "Receive_L";
        trace_.transmission(now_, d->receiver, prim, srp::packet_digest(d->packet), "delivered",
                            "from=" + srpsim::to_string(d->transmitter) + " kind=" + std::string(to_string(d->kind)));
        if (Agent* a = agents_[d->receiver.value]) a->on_delivery(*this, *d);
    } else if (const auto* f = std::get_if<FailureReport>(&ev.payload)) {
        trace_.transmission(now_, f->sender, "Send_L", srp::packet_digest(f->packet), "failure_reported",
                            "to=" + srpsim::to_string(f->receiver));
        if (Agent* a = agents_[f->sender.value]) a->on_failure(*this, *f);
    } else if (const auto* t = std::get_if<TimerFire>(&ev.payload)) {
        if (Agent* a = agents_[t->node.value]) a->on_timer(*this, t->id);
    } else if (const auto* na = std::get_if<NodeAction>(&ev.payload)) {
        trace_.add(format_time(now_) + " " + srpsim::to_string(na->node) + " invoke target=" +
                   srpsim::to_string(na->target));
        if (Agent* a = agents_[na->node.value]) a->on_action(*this, na->target);
    } else if (const auto* lc = std::get_if<LinkChange>(&ev.payload)) {
        trace_.add(format_time(now_) + " - link " + srpsim::to_string(lc->edge.lo) + "-" +
                   srpsim::to_string(lc->edge.hi) + (lc->up ? " up" : " down"));
    }
}

}  // namespace srpsim::sim
