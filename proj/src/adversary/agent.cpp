#include "srpsim/adversary/agent.hpp"

#include "srpsim/hash.hpp"

#include <algorithm>

namespace srpsim::adversary {

using srp::Discard;
using srp::DiscardReason;
using srp::Packet;
using srp::Rrep;
using srp::Rreq;

namespace {

bool extended_loop(NodeId a, const std::vector<NodeId>& mid, NodeId b) {
    std::vector<NodeId> seq{a};
    seq.insert(seq.end(), mid.begin(), mid.end());
    seq.push_back(b);
    return srp::has_duplicates(seq);
}

// Checks that need no state: what any neighbour can tell from the message
// and the link-layer sender alone.
std::optional<Discard> overheard_compliance(const sim::Delivery& d, const srp::ProtocolParams& params) {
    if (const auto* q = std::get_if<Rreq>(&d.packet)) {
        const NodeId last = q->node_list.empty() ? q->src : q->node_list.back();
        if (last != d.transmitter) return Discard{DiscardReason::precursor_mismatch, "2.2.2", "overheard"};
        std::vector<NodeId> seq{q->src};
        seq.insert(seq.end(), q->node_list.begin(), q->node_list.end());
        if (srp::has_duplicates(seq)) return Discard{DiscardReason::loop, "2.2.3", "overheard"};
        if (params.augmented && q->metric_list.size() != q->node_list.size()) {
            return Discard{DiscardReason::metric_length, "2.2.4.a", "overheard"};
        }
        return std::nullopt;
    }
    const auto& r = std::get<Rrep>(d.packet);
    if (params.augmented && r.metric_list.size() != r.route.size() + 1) {
        return Discard{DiscardReason::metric_length, "4.2.2", "overheard"};
    }
    const auto pos = srp::rrep_position(d.addressee, r);
    if (!pos) return Discard{DiscardReason::not_on_route, "4.1", "overheard"};
    if (pos->successor != d.transmitter) return Discard{DiscardReason::successor_mismatch, "4.1", "overheard"};
    if (extended_loop(r.src, r.route, r.dst)) return Discard{DiscardReason::loop, "4.3", "overheard"};
    return std::nullopt;
}

std::optional<std::size_t> position(int index, std::size_t size, bool allow_end) {
    const long long n = static_cast<long long>(size);
    long long i = index < 0 ? n + index + (allow_end ? 1 : 0) : index;
    if (i < 0 || i > n || (i == n && !allow_end)) return std::nullopt;
    return static_cast<std::size_t>(i);
}

template <class T>
bool edit_list(std::vector<T>& v, const Edit& e, T item) {
    switch (e.op) {
        case EditOp::append: v.push_back(item); return true;
        case EditOp::insert:
            if (auto i = position(e.index, v.size(), true)) {
                v.insert(v.begin() + static_cast<std::ptrdiff_t>(*i), item);
                return true;
            }
            return false;
        case EditOp::remove:
            if (auto i = position(e.index, v.size(), false)) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(*i));
                return true;
            }
            return false;
        case EditOp::replace:
            if (auto i = position(e.index, v.size(), false)) {
                v[*i] = item;
                return true;
            }
            return false;
        default: return false;
    }
}

bool apply_edit(Packet& p, const Edit& e) {
    auto* q = std::get_if<Rreq>(&p);
    auto* r = std::get_if<Rrep>(&p);
    switch (e.field) {
        case Field::node_list:
        case Field::route: {
            if ((e.field == Field::node_list) != (q != nullptr)) return false;
            auto& v = q != nullptr ? q->node_list : r->route;
            if (e.op == EditOp::remove_node) {
                const auto before = v.size();
                v.erase(std::remove(v.begin(), v.end(), e.node), v.end());
                return v.size() != before;
            }
            return edit_list(v, e, e.node);
        }
        case Field::metric_list: {
            auto& v = q != nullptr ? q->metric_list : r->metric_list;
            if (e.op == EditOp::add) {
                if (auto i = position(e.index, v.size(), false)) {
                    v[*i] += e.value;
                    return true;
                }
                return false;
            }
            if (e.op == EditOp::set) return edit_list(v, Edit{e.field, EditOp::replace, e.index, e.node, e.value}, e.value);
            return edit_list(v, e, e.value);
        }
        case Field::qid: {
            QueryId& qid = q != nullptr ? q->qid : r->qid;
            if (e.op == EditOp::set) qid = QueryId{static_cast<std::uint64_t>(std::max(0, e.index))};
            else if (e.op == EditOp::add) qid = QueryId{qid.value + static_cast<std::uint64_t>(std::max(0, e.index))};
            else return false;
            return true;
        }
    }
    return false;
}

NodeId packet_src(const Packet& p) { return std::visit([](const auto& m) { return m.src; }, p); }
NodeId packet_dst(const Packet& p) { return std::visit([](const auto& m) { return m.dst; }, p); }
QueryId packet_qid(const Packet& p) { return std::visit([](const auto& m) { return m.qid; }, p); }
std::size_t packet_len(const Packet& p) {
    if (const auto* q = std::get_if<Rreq>(&p)) return q->node_list.size();
    return std::get<Rrep>(p).route.size();
}

Trigger trigger_of(const sim::Delivery& d) {
    const bool rreq = srp::is_rreq(d.packet);
    switch (d.kind) {
        case sim::DeliveryKind::overheard: return Trigger::overheard;
        case sim::DeliveryKind::tunnel: return rreq ? Trigger::tunnel_rreq : Trigger::tunnel_rrep;
        default: return rreq ? Trigger::rreq : Trigger::rrep;
    }
}

bool matches(const Filter& f, NodeId from, const Packet& p) {
    if (f.from && *f.from != from) return false;
    if (f.src && *f.src != packet_src(p)) return false;
    if (f.dst && *f.dst != packet_dst(p)) return false;
    const auto len = static_cast<int>(packet_len(p));
    if (f.min_len && len < *f.min_len) return false;
    if (f.max_len && len > *f.max_len) return false;
    return true;
}

}  // namespace

std::optional<Discard> compliance(const srp::NodeState& observer, const sim::Delivery& d,
                                  const srp::ProtocolParams& params, const srp::MeasureFn& measure,
                                  const identity::Signer& signer) {
    if (d.kind == sim::DeliveryKind::overheard) return overheard_compliance(d, params);
    if (const auto* q = std::get_if<Rreq>(&d.packet)) {
        if (q->src == observer.self) return Discard{DiscardReason::own_query, "2.1", {}};
        if (q->dst == observer.self) {
            srp::NodeState fresh;
            fresh.self = observer.self;
            return srp::check_rreq_destination(fresh, *q, d.transmitter, params, signer);
        }
        return srp::check_rreq_intermediate(observer, *q, d.transmitter, params, false);
    }
    const auto& r = std::get<Rrep>(d.packet);
    if (r.src == observer.self) return srp::check_rrep_source(observer, r, d.transmitter, params, measure, signer);
    return srp::check_rrep_intermediate(observer, r, d.transmitter, params, measure);
}

AdversaryAgent::AdversaryAgent(NodeId self, AdversaryClass cls, AttackScript script, srp::ProtocolParams params,
                               const identity::Signer& signer, const qos::LinkMetricModel* model, std::uint64_t seed,
                               AdversaryLog* log)
    : cls_(cls),
      script_(std::move(script)),
      params_(params),
      signer_(&signer),
      model_(model),
      seed_(seed),
      log_(log),
      budget_(script_.budget) {
    validate(script_, cls_);
    state_.self = self;
}

qos::Metric AdversaryAgent::report(NodeId neighbour) const {
    if (model_ == nullptr || neighbour == state_.self) return 0;
    return model_->measure_biased(state_.self, sim::make_edge(state_.self, neighbour), script_.bias);
}

qos::Metric AdversaryAgent::honest(NodeId neighbour) const {
    if (model_ == nullptr || neighbour == state_.self) return 0;
    return model_->measure(state_.self, sim::make_edge(state_.self, neighbour));
}

void AdversaryAgent::arm(sim::Engine& engine) {
    for (std::size_t i = 0; i < script_.rules.size(); ++i) {
        const Rule& rule = script_.rules[i];
        if (rule.trigger != Trigger::at_time) continue;
        Context ctx;
        ctx.rule = i;
        ctx.from = state_.self;
        const std::uint64_t id = engine.set_timer(state_.self, std::max<Time>(0, rule.at - engine.now()));
        waiting_.emplace(id, std::move(ctx));
    }
}

void AdversaryAgent::note(sim::Engine& engine, const Context& ctx, const std::string& what,
                          const std::string& detail) {
    engine.trace().step(engine.now(), state_.self, "adv", what,
                        "cause=" + std::to_string(ctx.cause) + (detail.empty() ? "" : " " + detail));
}

void AdversaryAgent::on_delivery(sim::Engine& engine, const sim::Delivery& d) {
    const srp::MeasureFn meas = [this](NodeId n) { return honest(n); };
    if (const auto* q = std::get_if<Rreq>(&d.packet); q != nullptr && d.kind != sim::DeliveryKind::tunnel) {
        srp::observe_relay(state_, *q, d.transmitter, params_, meas);
    }
    const auto bad = compliance(state_, d, params_, meas, *signer_);
    Context ctx;
    ctx.cause = d.id;
    ctx.cause_compliant = !bad.has_value();
    ctx.from = d.kind == sim::DeliveryKind::tunnel ? d.origin : d.transmitter;
    ctx.received = d.packet;
    ctx.working = d.packet;
    if (bad && !script_.skip_checks) {
        if (log_ != nullptr) {
            log_->noncompliant.insert(d.id);
            ++log_->dropped_noncompliant;
        }
        // Overheard traffic is refused silently; it is not addressed to us.
        if (d.kind != sim::DeliveryKind::overheard) {
            note(engine, ctx, "refuse", std::string(srp::to_string(bad->reason)) + " step=" + bad->step);
        }
        return;
    }
    const Trigger trig = trigger_of(d);
    const NodeId src = packet_src(d.packet);
    const QueryId qid = packet_qid(d.packet);
    for (std::size_t i = 0; i < script_.rules.size(); ++i) {
        const Rule& rule = script_.rules[i];
        if (rule.trigger != trig || !matches(rule.filter, ctx.from, d.packet)) continue;
        if (rule.once_per_query && !fired_.emplace(i, src, qid).second) continue;
        ctx.rule = i;
        run_rule(engine, std::move(ctx));
        return;
    }
}

void AdversaryAgent::on_timer(sim::Engine& engine, std::uint64_t timer_id) {
    auto it = waiting_.find(timer_id);
    if (it == waiting_.end()) return;
    Context ctx = std::move(it->second);
    waiting_.erase(it);
    run_rule(engine, std::move(ctx));
}

void AdversaryAgent::run_rule(sim::Engine& engine, Context ctx) {
    const auto& actions = script_.rules[ctx.rule].actions;
    while (ctx.next < actions.size()) {
        const Action& a = actions[ctx.next++];
        if (a.kind == ActionKind::wait) {
            const std::uint64_t id = engine.set_timer(state_.self, a.delay);
            waiting_.emplace(id, std::move(ctx));
            return;
        }
        if (!apply(engine, ctx, a)) return;
    }
}

NodeId AdversaryAgent::predecessor_of(const Context& ctx, const Packet& p) const {
    const srp::QueryKey key{packet_src(p), packet_qid(p)};
    if (const auto* r = std::get_if<Rrep>(&p)) {
        const auto pos = srp::rrep_position(state_.self, *r);
        if (pos && !pos->is_source) return pos->predecessor;
    }
    auto rec = state_.relays.find(key);
    if (rec != state_.relays.end()) return rec->second.precursor;
    if (srp::is_rreq(p)) return ctx.from;
    return packet_src(p);
}

bool AdversaryAgent::transmit(sim::Engine& engine, Context& ctx, const char* what) {
    if (!ctx.working) return false;
    if (budget_ <= 0) {
        note(engine, ctx, "budget-exhausted", what);
        return false;
    }
    --budget_;
    if (const auto* q = std::get_if<Rreq>(&*ctx.working); q != nullptr && q->src != state_.self) {
        srp::record_relay(state_, *q, ctx.from, params_);
    }
    if (log_ != nullptr) {
        log_->transmissions.push_back(
            CausedTransmission{state_.self, cls_, ctx.cause, ctx.cause_compliant, ctx.received.value_or(Packet{})});
    }
    return true;
}

bool AdversaryAgent::apply(sim::Engine& engine, Context& ctx, const Action& a) {
    switch (a.kind) {
        case ActionKind::drop: note(engine, ctx, "drop", {}); return false;
        case ActionKind::wait: return true;
        case ActionKind::restore: ctx.working = ctx.received; return ctx.working.has_value();
        case ActionKind::store:
            if (ctx.working) stored_.push_back(*ctx.working);
            return true;
        case ActionKind::append_self: {
            if (!ctx.working) return false;
            if (auto* q = std::get_if<Rreq>(&*ctx.working)) {
                const NodeId prev = q->node_list.empty() ? q->src : q->node_list.back();
                q->node_list.push_back(state_.self);
                if (params_.augmented) q->metric_list.push_back(report(prev));
            }
            return true;
        }
        case ActionKind::edit: {
            if (!ctx.working) return false;
            if (!apply_edit(*ctx.working, a.edit)) note(engine, ctx, "edit-skipped", {});
            return true;
        }
        case ActionKind::forward: {
            if (!ctx.working) return false;
            if (srp::is_rreq(*ctx.working)) {
                Action self_append;
                self_append.kind = ActionKind::append_self;
                apply(engine, ctx, self_append);
                Action b;
                b.kind = ActionKind::bcast;
                return apply(engine, ctx, b);
            }
            Action p;
            p.kind = ActionKind::send_predecessor;
            return apply(engine, ctx, p);
        }
        case ActionKind::bcast: {
            if (!transmit(engine, ctx, "bcast")) return false;
            note(engine, ctx, "bcast", srp::describe(*ctx.working));
            engine.bcast_l(state_.self, *ctx.working);
            return true;
        }
        case ActionKind::send_to:
        case ActionKind::send_source:
        case ActionKind::send_predecessor: {
            if (!ctx.working) return false;
            NodeId to = a.peer;
            if (a.kind == ActionKind::send_source) to = packet_src(*ctx.working);
            if (a.kind == ActionKind::send_predecessor) to = predecessor_of(ctx, *ctx.working);
            if (to == state_.self) {
                note(engine, ctx, "send-skipped", "to=self");
                return false;
            }
            if (!transmit(engine, ctx, "send")) return false;
            note(engine, ctx, "send", "to=" + to_string(to) + " " + srp::describe(*ctx.working));
            engine.send_l(state_.self, to, *ctx.working);
            return true;
        }
        case ActionKind::tunnel_send: {
            if (!ctx.working || a.peer == state_.self) return false;
            std::vector<NodeId> path{state_.self};
            path.insert(path.end(), a.path.begin(), a.path.end());
            path.push_back(a.peer);
            if (std::adjacent_find(path.begin(), path.end()) != path.end()) {
                note(engine, ctx, "tunnel-skipped", "repeated hop");
                return false;
            }
            if (!transmit(engine, ctx, "tunnel")) return false;
            note(engine, ctx, "tunnel", "path=" + srp::join_nodes(path));
            engine.tunnel_send(path, *ctx.working);
            return true;
        }
        case ActionKind::replay: {
            const std::optional<Packet>& ref = ctx.received;
            for (auto it = stored_.rbegin(); it != stored_.rend(); ++it) {
                if (ref && (packet_src(*it) != packet_src(*ref) || packet_dst(*it) != packet_dst(*ref))) continue;
                Packet p = *it;
                if (a.rewrite_qid && ref) {
                    const QueryId q = packet_qid(*ref);
                    std::visit([q](auto& m) { m.qid = q; }, p);
                }
                ctx.working = std::move(p);
                note(engine, ctx, "replay", srp::describe(*ctx.working));
                return true;
            }
            note(engine, ctx, "replay-empty", {});
            return false;
        }
        case ActionKind::forge_rrep: {
            if (!ctx.working || !srp::is_rreq(*ctx.working)) return false;
            const Rreq q = std::get<Rreq>(*ctx.working);
            std::vector<NodeId> nl = q.node_list;
            std::vector<qos::Metric> ml = q.metric_list;
            if (a.include_self) {
                const NodeId prev = nl.empty() ? q.src : nl.back();
                nl.push_back(state_.self);
                ml.push_back(report(prev));
            }
            nl.insert(nl.end(), a.fake_tail.begin(), a.fake_tail.end());
            Rrep r;
            r.src = q.src;
            r.dst = q.dst;
            r.qid = q.qid;
            r.route.assign(nl.rbegin(), nl.rend());
            if (params_.augmented) {
                const qos::Metric filler = ml.empty() ? 0 : ml.back();
                ml.resize(nl.size() + 1, filler);
                r.metric_list.assign(ml.rbegin(), ml.rend());
            }
            r.auth = identity::Authenticator{splitmix64(seed_ ^ splitmix64(++forged_))};
            ctx.working = std::move(r);
            note(engine, ctx, "forge", srp::describe(*ctx.working));
            return true;
        }
    }
    return false;
}

}  // namespace srpsim::adversary
