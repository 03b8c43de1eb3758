#include "srpsim/adversary/catalog.hpp"

#include "srpsim/errors.hpp"

namespace srpsim::adversary {

NodeId AttackParams::need_node(const std::string& key, std::string_view attack) const {
    auto it = node.find(key);
    if (it == node.end()) throw InvalidArgument("attack '" + std::string(attack) + "' needs node parameter '" + key + "'");
    return it->second;
}

std::vector<NodeId> AttackParams::need_nodes(const std::string& key, std::string_view attack) const {
    auto it = nodes.find(key);
    if (it != nodes.end()) return it->second;
    auto one = node.find(key);
    if (one != node.end()) return {one->second};
    throw InvalidArgument("attack '" + std::string(attack) + "' needs node list parameter '" + key + "'");
}

double AttackParams::number_or(const std::string& key, double fallback) const {
    auto it = number.find(key);
    return it == number.end() ? fallback : it->second;
}

std::string AttackParams::text_or(const std::string& key, std::string fallback) const {
    auto it = text.find(key);
    return it == text.end() ? fallback : it->second;
}

namespace {

Action act(ActionKind k) {
    Action a;
    a.kind = k;
    return a;
}

Action send_to(NodeId peer) {
    Action a = act(ActionKind::send_to);
    a.peer = peer;
    return a;
}

Action wait_for(Time dt) {
    Action a = act(ActionKind::wait);
    a.delay = dt;
    return a;
}

Action edit(Field f, EditOp op, int index = 0, NodeId node = {}, qos::Metric value = 0) {
    Action a = act(ActionKind::edit);
    a.edit = Edit{f, op, index, node, value};
    return a;
}

Rule on(Trigger t, std::vector<Action> actions, bool once = true) {
    Rule r;
    r.trigger = t;
    r.actions = std::move(actions);
    r.once_per_query = once;
    return r;
}

Rule forward_rreqs() { return on(Trigger::rreq, {act(ActionKind::forward)}); }
Rule forward_rreps() { return on(Trigger::rrep, {act(ActionKind::forward)}); }

// Sends a tampered copy to `next` first, then after one maximum link delay
// broadcasts the untampered relay so the upstream neighbour still admits
// this node to its ForwardList.
std::vector<Action> dual_send(std::vector<Action> tamper, NodeId next, Time tau) {
    std::vector<Action> out = std::move(tamper);
    out.push_back(act(ActionKind::append_self));
    out.push_back(send_to(next));
    out.push_back(wait_for(tau));
    out.push_back(act(ActionKind::restore));
    out.push_back(act(ActionKind::append_self));
    out.push_back(act(ActionKind::bcast));
    return out;
}

const std::vector<CatalogEntry> kCatalog = {
    {"loop_inject", false, "dup", "insert a duplicate identity into the NodeList before relaying"},
    {"tamper_nodelist_downstream", false, "remove, next, [tau]",
     "downstream of the victim link, drop a NodeList entry and unicast the edited RREQ onward"},
    {"shortcut_relay", false, "remove, next, shortcut, [tau]",
     "as tamper_nodelist_downstream, then hand the RREP straight to a neighbour of the victim link"},
    {"tamper_nodelist_upstream", false, "fake", "upstream of the victim link, append invented identities"},
    {"tamper_rrep_route", false, "index, replace", "overwrite one Route entry of a relayed RREP"},
    {"impersonate_T", false, "to", "answer an RREQ with an RREP as if it came from the destination"},
    {"forge_rrep", false, "fake", "fabricate an RREP with an invented route tail and authenticator"},
    {"replay_stale_rrep", false, "[rewrite_qid]", "store a destination-generated RREP and replay it later"},
    {"tamper_metriclist_rrep", false, "index, delta", "change a MetricList entry of a relayed RREP"},
    {"tamper_metriclist_rreq_upstream", false, "index, delta, next, [tau]",
     "change an upstream MetricList entry of an RREQ"},
    {"tamper_metriclist_rreq_downstream", false, "[value]", "add MetricList entries for links not yet discovered"},
    {"biased_metric", false, "bias | \"max\" with route, [sign]",
     "relay correctly but report own link metrics with a fixed error"},
    {"fig1a_tunnel", true, "role=entry|exit, peer, path",
     "two colluders tunnel RREQ and RREP so the route shows a link between them"},
    {"fig1b_chain", true, "role=editor|relay, [fake], [back]",
     "an interior colluder invents NodeList entries and the others relay without checks"},
};

}  // namespace

const std::vector<CatalogEntry>& catalog() { return kCatalog; }

bool is_catalog_attack(std::string_view name) {
    for (const auto& e : kCatalog) {
        if (e.name == name) return true;
    }
    return false;
}

AttackScript attack(std::string_view name, const AttackParams& p) {
    AttackScript s;
    s.name = std::string(name);
    const Time tau = p.number_or("tau", 2.0);

    if (name == "loop_inject") {
        const NodeId dup = p.need_node("dup", name);
        s.rules = {on(Trigger::rreq, {edit(Field::node_list, EditOp::append, 0, dup), act(ActionKind::append_self),
                                      act(ActionKind::bcast)}),
                   forward_rreps()};
    } else if (name == "tamper_nodelist_downstream" || name == "shortcut_relay") {
        const NodeId remove = p.need_node("remove", name);
        const NodeId next = p.need_node("next", name);
        Rule rreq = on(Trigger::rreq, dual_send({edit(Field::node_list, EditOp::remove_node, 0, remove)}, next, tau));
        if (name == "shortcut_relay") {
            const NodeId shortcut = p.need_node("shortcut", name);
            // Ignore copies heard directly from the shortcut neighbour so the
            // RREQ is relayed along the long way round.
            Rule ignore = on(Trigger::rreq, {act(ActionKind::drop)}, false);
            ignore.filter.from = shortcut;
            s.rules = {ignore, rreq, on(Trigger::rrep, {send_to(shortcut)})};
        } else {
            s.rules = {rreq, forward_rreps()};
        }
    } else if (name == "tamper_nodelist_upstream") {
        std::vector<Action> acts;
        for (NodeId f : p.need_nodes("fake", name)) acts.push_back(edit(Field::node_list, EditOp::append, 0, f));
        acts.push_back(act(ActionKind::append_self));
        acts.push_back(act(ActionKind::bcast));
        s.rules = {on(Trigger::rreq, std::move(acts)), on(Trigger::rrep, {act(ActionKind::send_source)})};
    } else if (name == "tamper_rrep_route") {
        const int index = static_cast<int>(p.number_or("index", 0));
        const NodeId replace = p.need_node("replace", name);
        s.rules = {forward_rreqs(),
                   on(Trigger::rrep, {edit(Field::route, EditOp::replace, index, replace), act(ActionKind::forward)})};
    } else if (name == "impersonate_T") {
        const NodeId to = p.need_node("to", name);
        Action forge = act(ActionKind::forge_rrep);
        forge.include_self = false;
        s.rules = {on(Trigger::rreq, {forge, send_to(to)})};
    } else if (name == "forge_rrep") {
        Action forge = act(ActionKind::forge_rrep);
        forge.fake_tail = p.need_nodes("fake", name);
        forge.include_self = false;  // already appended for the honest relay
        s.rules = {on(Trigger::rreq, {act(ActionKind::append_self), act(ActionKind::bcast), forge,
                                      act(ActionKind::send_predecessor)}),
                   forward_rreps()};
    } else if (name == "replay_stale_rrep") {
        Action replay = act(ActionKind::replay);
        replay.rewrite_qid = p.number_or("rewrite_qid", 0) != 0;
        s.rules = {on(Trigger::rreq, {act(ActionKind::forward), wait_for(p.number_or("delay", 1.0)), replay,
                                      act(ActionKind::send_predecessor)}),
                   on(Trigger::rrep, {act(ActionKind::store), act(ActionKind::forward)})};
    } else if (name == "tamper_metriclist_rrep") {
        const int index = static_cast<int>(p.number_or("index", 0));
        const qos::Metric delta = qos::to_fixed(p.number_or("delta", 1.0));
        s.rules = {forward_rreqs(),
                   on(Trigger::rrep, {edit(Field::metric_list, EditOp::add, index, {}, delta), act(ActionKind::forward)})};
    } else if (name == "tamper_metriclist_rreq_upstream") {
        const int index = static_cast<int>(p.number_or("index", 0));
        const qos::Metric delta = qos::to_fixed(p.number_or("delta", 1.0));
        const NodeId next = p.need_node("next", name);
        s.rules = {on(Trigger::rreq, dual_send({edit(Field::metric_list, EditOp::add, index, {}, delta)}, next, tau)),
                   forward_rreps()};
    } else if (name == "tamper_metriclist_rreq_downstream") {
        const qos::Metric value = qos::to_fixed(p.number_or("value", 0.0));
        s.rules = {on(Trigger::rreq, {edit(Field::metric_list, EditOp::append, 0, {}, value),
                                      act(ActionKind::append_self), act(ActionKind::bcast)}),
                   forward_rreps()};
    } else if (name == "biased_metric") {
        s.bias = qos::to_fixed(p.number_or("bias", 0.0));
        s.rules = {forward_rreqs(), forward_rreps()};
    } else if (name == "fig1a_tunnel") {
        const std::string role = p.text_or("role", "");
        const NodeId peer = p.need_node("peer", name);
        const auto path = p.nodes.contains("path") ? p.need_nodes("path", name) : std::vector<NodeId>{};
        s.arbitrary_only = true;
        s.skip_checks = true;
        Action tunnel = act(ActionKind::tunnel_send);
        tunnel.peer = peer;
        tunnel.path = path;
        if (role == "entry") {
            s.rules = {on(Trigger::rreq, {act(ActionKind::forward), tunnel}),
                       on(Trigger::tunnel_rrep, {act(ActionKind::send_predecessor)})};
        } else if (role == "exit") {
            s.rules = {on(Trigger::rreq, {act(ActionKind::drop)}, false),
                       on(Trigger::tunnel_rreq, {act(ActionKind::forward)}), on(Trigger::rrep, {tunnel})};
        } else {
            throw InvalidArgument("attack 'fig1a_tunnel' needs role 'entry' or 'exit'");
        }
    } else if (name == "fig1b_chain") {
        const std::string role = p.text_or("role", "");
        s.arbitrary_only = true;
        if (role == "editor") {
            std::vector<Action> acts;
            for (NodeId f : p.need_nodes("fake", name)) acts.push_back(edit(Field::node_list, EditOp::append, 0, f));
            acts.push_back(act(ActionKind::append_self));
            acts.push_back(act(ActionKind::bcast));
            s.rules = {on(Trigger::rreq, std::move(acts)), on(Trigger::rrep, {send_to(p.need_node("back", name))})};
        } else if (role == "relay") {
            s.skip_checks = true;
            s.rules = {forward_rreqs(), forward_rreps()};
        } else {
            throw InvalidArgument("attack 'fig1b_chain' needs role 'editor' or 'relay'");
        }
    } else {
        throw InvalidArgument("unknown attack '" + std::string(name) + "'");
    }
    return s;
}

}  // namespace srpsim::adversary
