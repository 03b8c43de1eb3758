#include "srpsim/adversary/script.hpp"

#include "srpsim/errors.hpp"

#include <array>
#include <utility>

namespace srpsim::adversary {

using nlohmann::json;

namespace {

template <class E, std::size_t N>
std::string_view enum_name(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [e, name] : table) {
        if (e == v) return name;
    }
    return "?";
}

template <class E, std::size_t N>
E enum_parse(std::string_view text, const std::array<std::pair<E, std::string_view>, N>& table, const char* what) {
    for (const auto& [e, name] : table) {
        if (name == text) return e;
    }
    throw InvalidArgument(std::string("unknown ") + what + " '" + std::string(text) + "'");
}

constexpr std::array<std::pair<Trigger, std::string_view>, 6> kTriggers{{
    {Trigger::rreq, "rreq"},
    {Trigger::rrep, "rrep"},
    {Trigger::overheard, "overheard"},
    {Trigger::tunnel_rreq, "tunnel_rreq"},
    {Trigger::tunnel_rrep, "tunnel_rrep"},
    {Trigger::at_time, "at_time"},
}};

constexpr std::array<std::pair<Field, std::string_view>, 4> kFields{{
    {Field::node_list, "node_list"},
    {Field::route, "route"},
    {Field::metric_list, "metric_list"},
    {Field::qid, "qid"},
}};

constexpr std::array<std::pair<EditOp, std::string_view>, 7> kEditOps{{
    {EditOp::append, "append"},
    {EditOp::insert, "insert"},
    {EditOp::remove, "remove"},
    {EditOp::remove_node, "remove_node"},
    {EditOp::replace, "replace"},
    {EditOp::add, "add"},
    {EditOp::set, "set"},
}};

constexpr std::array<std::pair<ActionKind, std::string_view>, 14> kActions{{
    {ActionKind::drop, "drop"},
    {ActionKind::forward, "forward"},
    {ActionKind::append_self, "append_self"},
    {ActionKind::edit, "edit"},
    {ActionKind::bcast, "bcast"},
    {ActionKind::send_to, "send_to"},
    {ActionKind::send_source, "send_source"},
    {ActionKind::send_predecessor, "send_predecessor"},
    {ActionKind::store, "store"},
    {ActionKind::replay, "replay"},
    {ActionKind::forge_rrep, "forge_rrep"},
    {ActionKind::tunnel_send, "tunnel_send"},
    {ActionKind::wait, "wait"},
    {ActionKind::restore, "restore"},
}};

json names(const std::vector<NodeId>& ids, const IdToName& name_of) {
    json out = json::array();
    for (NodeId id : ids) out.push_back(name_of(id));
    return out;
}

std::vector<NodeId> ids(const json& j, const NameToId& id_of, const std::string& where) {
    if (!j.is_array()) throw InvalidArgument(where + ": expected an array of node names");
    std::vector<NodeId> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw InvalidArgument(where + ": expected node name");
        out.push_back(id_of(e.get<std::string>()));
    }
    return out;
}

NodeId node_at(const json& j, const char* key, const NameToId& id_of, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) {
        throw InvalidArgument(where + "/" + key + ": expected node name");
    }
    return id_of(j.at(key).get<std::string>());
}

}  // namespace

std::string_view to_string(AdversaryClass c) noexcept {
    return c == AdversaryClass::independent ? "independent" : "arbitrary";
}

AdversaryClass parse_class(std::string_view text) {
    if (text == "independent") return AdversaryClass::independent;
    if (text == "arbitrary") return AdversaryClass::arbitrary;
    throw InvalidArgument("unknown adversary class '" + std::string(text) + "'");
}

bool requires_arbitrary(const AttackScript& script, std::string* why) {
    auto fail = [&](std::string msg) {
        if (why != nullptr) *why = std::move(msg);
        return true;
    };
    if (script.arbitrary_only) return fail("attack '" + script.name + "' is arbitrary-only");
    if (script.skip_checks) return fail("skipping protocol checks acts on non-compliant messages");
    for (const auto& rule : script.rules) {
        if (rule.trigger == Trigger::tunnel_rreq || rule.trigger == Trigger::tunnel_rrep) {
            return fail("tunnel triggers need the inter-adversary channel");
        }
        for (const auto& a : rule.actions) {
            if (a.kind == ActionKind::tunnel_send) return fail("tunnel_send needs the inter-adversary channel");
        }
    }
    return false;
}

void validate(const AttackScript& script, AdversaryClass cls) {
    if (script.budget < 0) throw InvalidArgument("script budget must be non-negative");
    for (const auto& rule : script.rules) {
        for (const auto& a : rule.actions) {
            if (a.kind == ActionKind::wait && !(a.delay >= 0)) throw InvalidArgument("wait needs a non-negative delay");
        }
    }
    std::string why;
    if (cls == AdversaryClass::independent && requires_arbitrary(script, &why)) {
        throw InvalidArgument("independent adversaries never act on non-compliant messages: " + why);
    }
}

AttackScript demote(AttackScript script) {
    script.arbitrary_only = false;
    script.skip_checks = false;
    for (auto& rule : script.rules) {
        if (rule.trigger == Trigger::tunnel_rreq) rule.trigger = Trigger::rreq;
        if (rule.trigger == Trigger::tunnel_rrep) rule.trigger = Trigger::rrep;
        for (auto& a : rule.actions) {
            if (a.kind == ActionKind::tunnel_send) {
                a.kind = ActionKind::send_to;
                a.path.clear();
            }
        }
    }
    return script;
}

json to_json(const AttackScript& s, const IdToName& name_of) {
    json rules = json::array();
    for (const auto& r : s.rules) {
        json jr;
        jr["on"] = enum_name(r.trigger, kTriggers);
        if (r.trigger == Trigger::at_time) jr["at"] = r.at;
        if (r.filter.from) jr["from"] = name_of(*r.filter.from);
        if (r.filter.src) jr["src"] = name_of(*r.filter.src);
        if (r.filter.dst) jr["dst"] = name_of(*r.filter.dst);
        if (r.filter.min_len) jr["min_len"] = *r.filter.min_len;
        if (r.filter.max_len) jr["max_len"] = *r.filter.max_len;
        jr["once"] = r.once_per_query;
        json acts = json::array();
        for (const auto& a : r.actions) {
            json ja;
            ja["op"] = enum_name(a.kind, kActions);
            switch (a.kind) {
                case ActionKind::edit:
                    ja["field"] = enum_name(a.edit.field, kFields);
                    ja["edit"] = enum_name(a.edit.op, kEditOps);
                    ja["index"] = a.edit.index;
                    ja["node"] = name_of(a.edit.node);
                    ja["value"] = qos::to_real(a.edit.value);
                    break;
                case ActionKind::send_to: ja["peer"] = name_of(a.peer); break;
                case ActionKind::tunnel_send:
                    ja["peer"] = name_of(a.peer);
                    ja["path"] = names(a.path, name_of);
                    break;
                case ActionKind::forge_rrep:
                    ja["fake_tail"] = names(a.fake_tail, name_of);
                    ja["include_self"] = a.include_self;
                    break;
                case ActionKind::replay: ja["rewrite_qid"] = a.rewrite_qid; break;
                case ActionKind::wait: ja["dt"] = a.delay; break;
                default: break;
            }
            acts.push_back(std::move(ja));
        }
        jr["do"] = std::move(acts);
        rules.push_back(std::move(jr));
    }
    return json{{"name", s.name},
                {"arbitrary_only", s.arbitrary_only},
                {"skip_checks", s.skip_checks},
                {"budget", s.budget},
                {"bias", qos::to_real(s.bias)},
                {"rules", std::move(rules)}};
}

AttackScript script_from_json(const json& j, const NameToId& id_of) {
    if (!j.is_object()) throw InvalidArgument("script: expected an object");
    AttackScript s;
    s.name = j.value("name", std::string("custom"));
    s.arbitrary_only = j.value("arbitrary_only", false);
    s.skip_checks = j.value("skip_checks", false);
    s.budget = j.value("budget", 64);
    s.bias = qos::to_fixed(j.value("bias", 0.0));
    if (!j.contains("rules") || !j.at("rules").is_array()) throw InvalidArgument("script/rules: expected an array");
    std::size_t ri = 0;
    for (const auto& jr : j.at("rules")) {
        const std::string where = "script/rules/" + std::to_string(ri++);
        if (!jr.is_object()) throw InvalidArgument(where + ": expected an object");
        Rule r;
        r.trigger = enum_parse(jr.value("on", std::string("rreq")), kTriggers, "trigger");
        r.at = jr.value("at", 0.0);
        if (jr.contains("from")) r.filter.from = node_at(jr, "from", id_of, where);
        if (jr.contains("src")) r.filter.src = node_at(jr, "src", id_of, where);
        if (jr.contains("dst")) r.filter.dst = node_at(jr, "dst", id_of, where);
        if (jr.contains("min_len")) r.filter.min_len = jr.at("min_len").get<int>();
        if (jr.contains("max_len")) r.filter.max_len = jr.at("max_len").get<int>();
        r.once_per_query = jr.value("once", true);
        if (!jr.contains("do") || !jr.at("do").is_array()) throw InvalidArgument(where + "/do: expected an array");
        std::size_t ai = 0;
        for (const auto& ja : jr.at("do")) {
            const std::string aw = where + "/do/" + std::to_string(ai++);
            if (!ja.is_object() || !ja.contains("op")) throw InvalidArgument(aw + ": expected an object with 'op'");
            Action a;
            a.kind = enum_parse(ja.at("op").get<std::string>(), kActions, "action");
            switch (a.kind) {
                case ActionKind::edit:
                    a.edit.field = enum_parse(ja.value("field", std::string("node_list")), kFields, "field");
                    a.edit.op = enum_parse(ja.value("edit", std::string("append")), kEditOps, "edit");
                    a.edit.index = ja.value("index", 0);
                    if (ja.contains("node")) a.edit.node = node_at(ja, "node", id_of, aw);
                    a.edit.value = qos::to_fixed(ja.value("value", 0.0));
                    break;
                case ActionKind::send_to: a.peer = node_at(ja, "peer", id_of, aw); break;
                case ActionKind::tunnel_send:
                    a.peer = node_at(ja, "peer", id_of, aw);
                    a.path = ids(ja.value("path", json::array()), id_of, aw + "/path");
                    break;
                case ActionKind::forge_rrep:
                    a.fake_tail = ids(ja.value("fake_tail", json::array()), id_of, aw + "/fake_tail");
                    a.include_self = ja.value("include_self", true);
                    break;
                case ActionKind::replay: a.rewrite_qid = ja.value("rewrite_qid", false); break;
                case ActionKind::wait: a.delay = ja.value("dt", 0.0); break;
                default: break;
            }
            r.actions.push_back(std::move(a));
        }
        s.rules.push_back(std::move(r));
    }
    return s;
}

}  // namespace srpsim::adversary
