#include "srpsim/harness/scenario.hpp"

#include "srpsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace srpsim::harness {

using nlohmann::json;

std::string_view to_string(Property p) noexcept {
    switch (p) {
        case Property::loop_free: return "loop_free";
        case Property::fresh: return "fresh";
        case Property::weakly_fresh: return "weakly_fresh";
        case Property::accurate: return "accurate";
        case Property::exact: return "exact";
        case Property::auth_from_destination: return "auth_from_destination";
    }
    return "?";
}

std::string_view to_string(Quantifier q) noexcept {
    switch (q) {
        case Quantifier::all: return "all";
        case Quantifier::none: return "none";
        case Quantifier::not_all: return "not-all";
        case Quantifier::any: return "any";
    }
    return "?";
}

NodeId Scenario::id(std::string_view name) const {
    auto it = std::find(nodes.begin(), nodes.end(), name);
    if (it == nodes.end()) throw InvalidArgument("unknown node '" + std::string(name) + "'");
    return NodeId{static_cast<std::uint32_t>(it - nodes.begin())};
}

std::string Scenario::name_of(NodeId id) const {
    return id.value < nodes.size() ? nodes[id.value] : "#" + to_string(id);
}

srp::ReplyWaitPolicy Scenario::reply_wait() const {
    auto p = srp::ReplyWaitPolicy::defaults(config.tau, max_hops);
    if (reply_wait_min) {
        p.min = *reply_wait_min;
        if (!reply_wait_max) p.max = 16.0 * p.min;
    }
    if (reply_wait_max) p.max = *reply_wait_max;
    return p;
}

std::set<NodeId> Scenario::adversary_nodes() const {
    std::set<NodeId> out;
    for (const auto& a : adversaries) out.insert(a.node);
    return out;
}

const AdversarySpec* Scenario::adversary_at(NodeId node) const {
    for (const auto& a : adversaries) {
        if (a.node == node) return &a;
    }
    return nullptr;
}

namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& what) { throw ScenarioError(ptr, what); }

std::string child(const std::string& ptr, const std::string& key) {
    std::string escaped;
    for (char c : key) {
        if (c == '~') escaped += "~0";
        else if (c == '/') escaped += "~1";
        else escaped += c;
    }
    return ptr + "/" + escaped;
}

std::string child(const std::string& ptr, std::size_t index) { return ptr + "/" + std::to_string(index); }

const json& need(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.contains(key)) fail(child(ptr, key), "missing");
    return obj.at(key);
}

const json& need_array(const json& j, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array");
    return j;
}

const json& need_object(const json& j, const std::string& ptr) {
    if (!j.is_object()) fail(ptr, "expected an object");
    return j;
}

double number(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(ptr, "expected a finite number");
    return v;
}

double number_or(const json& obj, const std::string& ptr, const char* key, double fallback) {
    return obj.contains(key) ? number(obj.at(key), child(ptr, key)) : fallback;
}

std::string text(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

bool boolean_or(const json& obj, const std::string& ptr, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) fail(child(ptr, key), "expected true or false");
    return obj.at(key).get<bool>();
}

void reject_unknown(const json& obj, const std::string& ptr, std::initializer_list<std::string_view> known) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) fail(child(ptr, key), "unknown key");
    }
}

NodeId node_ref(const Scenario& sc, const json& j, const std::string& ptr) {
    const std::string name = text(j, ptr);
    try {
        return sc.id(name);
    } catch (const InvalidArgument& e) {
        fail(ptr, e.what());
    }
}

sim::Edge edge_ref(const Scenario& sc, const json& j, const std::string& ptr) {
    need_array(j, ptr);
    if (j.size() != 2) fail(ptr, "an edge names exactly two nodes");
    const NodeId a = node_ref(sc, j[0], child(ptr, 0));
    const NodeId b = node_ref(sc, j[1], child(ptr, 1));
    if (a == b) fail(ptr, "an edge needs two distinct nodes");
    return sim::make_edge(a, b);
}

std::pair<int, int> line_col(std::string_view text, std::size_t byte) {
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    // nlohmann reports the byte after the offending character. Past the end
    // of input, point just after the last character instead.
    if (byte > text.size()) return {line, col};
    return {line, std::max(1, col - 1)};
}

void read_config(Scenario& sc, const json& root) {
    if (!root.contains("config")) return;
    const std::string ptr = "/config";
    const json& c = need_object(root.at("config"), ptr);
    reject_unknown(c, ptr, {"tau", "tx_time", "seed", "end_time", "radius", "reply_wait_min", "reply_wait_max",
                            "max_hops"});
    sc.config.tau = number_or(c, ptr, "tau", sc.config.tau);
    sc.config.tx_time = number_or(c, ptr, "tx_time", sc.config.tx_time);
    sc.config.end_time = number_or(c, ptr, "end_time", sc.config.end_time);
    sc.config.radius = number_or(c, ptr, "radius", sc.config.radius);
    if (c.contains("seed")) {
        if (!c.at("seed").is_number_unsigned()) fail("/config/seed", "expected a non-negative integer");
        sc.config.seed = c.at("seed").get<std::uint64_t>();
    }
    if (c.contains("reply_wait_min")) sc.reply_wait_min = number(c.at("reply_wait_min"), "/config/reply_wait_min");
    if (c.contains("reply_wait_max")) sc.reply_wait_max = number(c.at("reply_wait_max"), "/config/reply_wait_max");
    if (c.contains("max_hops")) {
        if (!c.at("max_hops").is_number_integer() || c.at("max_hops").get<int>() < 1) {
            fail("/config/max_hops", "expected a positive integer");
        }
        sc.max_hops = c.at("max_hops").get<int>();
    }
    try {
        sc.config.validate();
    } catch (const InvalidArgument& e) {
        fail(ptr, e.what());
    }
    try {
        sc.reply_wait().validate();
    } catch (const InvalidArgument& e) {
        fail(ptr, e.what());
    }
}

void read_nodes(Scenario& sc, const json& root) {
    const json& nodes = need_array(need(root, "", "nodes"), "/nodes");
    if (nodes.empty()) fail("/nodes", "at least one node is needed");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::string name = text(nodes[i], child("/nodes", i));
        if (name.empty()) fail(child("/nodes", i), "empty node name");
        if (std::find(sc.nodes.begin(), sc.nodes.end(), name) != sc.nodes.end()) {
            fail(child("/nodes", i), "duplicate node '" + name + "'");
        }
        sc.nodes.push_back(std::move(name));
    }
}

void read_links(Scenario& sc, const json& root) {
    if (!root.contains("links")) return;
    const json& links = need_array(root.at("links"), "/links");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string ptr = child("/links", i);
        const json& l = need_object(links[i], ptr);
        reject_unknown(l, ptr, {"edge", "up"});
        const sim::Edge edge = edge_ref(sc, need(l, ptr, "edge"), child(ptr, "edge"));
        std::vector<sim::Interval> up;
        const std::string up_ptr = child(ptr, "up");
        const json& ivs = need_array(need(l, ptr, "up"), up_ptr);
        for (std::size_t k = 0; k < ivs.size(); ++k) {
            const std::string ip = child(up_ptr, k);
            need_array(ivs[k], ip);
            if (ivs[k].size() != 2) fail(ip, "an interval is [begin, end]; end may be null for 'never goes down'");
            const double b = number(ivs[k][0], child(ip, 0));
            const double e = ivs[k][1].is_null() ? std::numeric_limits<double>::infinity()
                                                 : number(ivs[k][1], child(ip, 1));
            up.push_back(sim::Interval{b, e});
        }
        sim::LinkSchedule sched(edge, std::move(up));
        try {
            sched.validate(sc.config.tx_time);
            sc.topology.add(std::move(sched));
        } catch (const InvalidArgument& e) {
            fail(ptr, e.what());
        }
    }
}

void read_keys(Scenario& sc, const json& root) {
    if (!root.contains("keys")) {
        return;
    }
    const json& keys = root.at("keys");
    if (keys.is_string()) {
        if (keys.get<std::string>() != "all") fail("/keys", "expected \"all\" or a list of node pairs");
        for (std::uint32_t a = 0; a < sc.nodes.size(); ++a) {
            for (std::uint32_t b = a + 1; b < sc.nodes.size(); ++b) sc.keys.emplace_back(NodeId{a}, NodeId{b});
        }
        return;
    }
    need_array(keys, "/keys");
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const sim::Edge e = edge_ref(sc, keys[i], child("/keys", i));
        sc.keys.emplace_back(e.lo, e.hi);
    }
}

void read_metrics(Scenario& sc, const json& root) {
    if (!root.contains("metrics")) {
        if (sc.augmented) fail("/metrics", "augmented mode needs a metrics section");
        return;
    }
    const std::string ptr = "/metrics";
    const json& m = need_object(root.at("metrics"), ptr);
    reject_unknown(m, ptr, {"kind", "epsilon", "delta_tilde", "administrative", "quantity", "actual", "default"});
    MetricSpec spec;
    try {
        if (m.contains("kind")) spec.config.kind = qos::parse_gkind(text(m.at("kind"), "/metrics/kind"));
    } catch (const InvalidArgument& e) {
        fail("/metrics/kind", e.what());
    }
    spec.config.epsilon = qos::to_fixed(number_or(m, ptr, "epsilon", 0.1));
    spec.config.delta_tilde = qos::to_fixed(number_or(m, ptr, "delta_tilde", 0.0));
    spec.config.administrative = boolean_or(m, ptr, "administrative", false);
    if (m.contains("quantity")) spec.config.quantity = text(m.at("quantity"), "/metrics/quantity");
    if (qos::is_node_local_quantity(spec.config.quantity)) {
        fail("/metrics/quantity", "'" + spec.config.quantity +
                                      "' is decided by one node alone and cannot be checked by its neighbour");
    }
    if (!spec.config.administrative && spec.config.epsilon <= 0) fail("/metrics/epsilon", "must be positive");
    if (spec.config.delta_tilde < 0) fail("/metrics/delta_tilde", "must be non-negative");
    if (m.contains("default")) spec.fallback = number(m.at("default"), "/metrics/default");
    if (m.contains("actual")) {
        const json& act = need_array(m.at("actual"), "/metrics/actual");
        for (std::size_t i = 0; i < act.size(); ++i) {
            const std::string ap = child("/metrics/actual", i);
            const json& a = need_object(act[i], ap);
            const sim::Edge e = edge_ref(sc, need(a, ap, "edge"), child(ap, "edge"));
            spec.actual.emplace_back(e, number(need(a, ap, "value"), child(ap, "value")));
        }
    }
    // Build once to surface value errors (g_mul needs positive values).
    qos::LinkMetricModel probe(spec.config, 0);
    for (std::size_t i = 0; i < spec.actual.size(); ++i) {
        try {
            probe.set_actual(spec.actual[i].first, spec.actual[i].second);
        } catch (const InvalidArgument& e) {
            fail(child(child("/metrics/actual", i), "value"), e.what());
        }
    }
    if (spec.fallback) {
        try {
            probe.set_default(*spec.fallback);
        } catch (const InvalidArgument& e) {
            fail("/metrics/default", e.what());
        }
    }
    sc.metrics = std::move(spec);
}

void read_adversaries(Scenario& sc, const json& root) {
    if (!root.contains("adversaries")) return;
    const json& advs = need_array(root.at("adversaries"), "/adversaries");
    std::set<NodeId> taken;
    for (std::size_t i = 0; i < advs.size(); ++i) {
        const std::string ptr = child("/adversaries", i);
        const json& a = need_object(advs[i], ptr);
        reject_unknown(a, ptr, {"node", "class", "attack", "params", "script", "demote"});
        AdversarySpec spec;
        spec.node = node_ref(sc, need(a, ptr, "node"), child(ptr, "node"));
        if (!taken.insert(spec.node).second) fail(child(ptr, "node"), "node already has an adversary entry");
        try {
            spec.cls = adversary::parse_class(text(need(a, ptr, "class"), child(ptr, "class")));
        } catch (const InvalidArgument& e) {
            fail(child(ptr, "class"), e.what());
        }
        spec.demote = boolean_or(a, ptr, "demote", false);
        if (a.contains("script")) {
            if (a.contains("attack")) fail(ptr, "give either 'attack' or 'script', not both");
            spec.attack = "script";
            spec.params = a.at("script");
            try {
                spec.script = adversary::script_from_json(a.at("script"), [&](const std::string& n) { return sc.id(n); });
            } catch (const InvalidArgument& e) {
                fail(child(ptr, "script"), e.what());
            }
        } else {
            spec.attack = text(need(a, ptr, "attack"), child(ptr, "attack"));
            spec.params = a.contains("params") ? a.at("params") : json::object();
            need_object(spec.params, child(ptr, "params"));
            try {
                spec.script = catalog_script(sc, spec.attack, spec.params, &spec.max_bias);
            } catch (const InvalidArgument& e) {
                fail(a.contains("params") ? child(ptr, "params") : child(ptr, "attack"), e.what());
            }
        }
        if (spec.demote) spec.script = adversary::demote(std::move(spec.script));
        try {
            adversary::validate(spec.script, spec.cls);
        } catch (const InvalidArgument& e) {
            fail(child(ptr, "class"), e.what());
        }
        sc.adversaries.push_back(std::move(spec));
    }
}

void read_discoveries(Scenario& sc, const json& root) {
    if (!root.contains("discoveries")) return;
    const json& ds = need_array(root.at("discoveries"), "/discoveries");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::string ptr = child("/discoveries", i);
        const json& d = need_object(ds[i], ptr);
        reject_unknown(d, ptr, {"source", "target", "at"});
        DiscoverySpec spec;
        spec.source = node_ref(sc, need(d, ptr, "source"), child(ptr, "source"));
        spec.target = node_ref(sc, need(d, ptr, "target"), child(ptr, "target"));
        if (spec.source == spec.target) fail(child(ptr, "target"), "source and target must differ");
        spec.at = number_or(d, ptr, "at", 0.0);
        if (spec.at < 0) fail(child(ptr, "at"), "must be non-negative");
        sc.discoveries.push_back(spec);
    }
}

const std::map<std::string, Property, std::less<>> kProperties = {
    {"loop_free", Property::loop_free},
    {"fresh", Property::fresh},
    {"weakly_fresh", Property::weakly_fresh},
    {"accurate", Property::accurate},
    {"exact", Property::exact},
    {"auth_from_destination", Property::auth_from_destination},
};

void read_expect(Scenario& sc, const json& root) {
    if (!root.contains("expect")) return;
    const json& ex = need_array(root.at("expect"), "/expect");
    for (std::size_t i = 0; i < ex.size(); ++i) {
        const std::string ptr = child("/expect", i);
        const json& e = need_object(ex[i], ptr);
        Expectation out;
        bool have = false;
        for (const auto& [key, value] : e.items()) {
            const std::string kp = child(ptr, key);
            if (key == "with_link") {
                out.with_link = edge_ref(sc, value, kp);
            } else if (key == "since") {
                out.since = number(value, kp);
            } else if (key == "accepted") {
                if (have) fail(kp, "one property or count per expectation");
                have = true;
                out.is_count = true;
                const std::string s = text(value, kp);
                std::size_t k = 0;
                while (k < s.size() && std::string_view("<>=!").find(s[k]) != std::string_view::npos) ++k;
                out.op = s.substr(0, k);
                if (out.op != "==" && out.op != ">=" && out.op != "<=" && out.op != ">" && out.op != "<") {
                    fail(kp, "expected a comparison such as \"==0\" or \">=1\"");
                }
                try {
                    std::size_t used = 0;
                    out.count = std::stoul(s.substr(k), &used);
                    if (used != s.size() - k) throw std::invalid_argument("trailing");
                } catch (const std::exception&) {
                    fail(kp, "expected a comparison such as \"==0\" or \">=1\"");
                }
            } else if (auto p = kProperties.find(key); p != kProperties.end()) {
                if (have) fail(kp, "one property or count per expectation");
                have = true;
                out.property = p->second;
                const std::string q = text(value, kp);
                if (q == "all") out.quantifier = Quantifier::all;
                else if (q == "none") out.quantifier = Quantifier::none;
                else if (q == "not-all") out.quantifier = Quantifier::not_all;
                else if (q == "any") out.quantifier = Quantifier::any;
                else fail(kp, "expected all, none, not-all or any");
            } else {
                fail(kp, "unknown expectation key");
            }
        }
        if (!have) fail(ptr, "expectation names no property and no 'accepted' count");
        out.text = e.dump();
        sc.expect.push_back(std::move(out));
    }
}

}  // namespace

adversary::AttackScript catalog_script(const Scenario& sc, const std::string& attack, const json& params,
                                       std::optional<MaxBias>* max_bias) {
    if (!adversary::is_catalog_attack(attack)) throw InvalidArgument("unknown attack '" + attack + "'");
    adversary::AttackParams p;
    p.number["tau"] = sc.config.tau;
    for (const auto& [key, value] : params.items()) {
        if (value.is_string()) {
            const std::string s = value.get<std::string>();
            if (std::find(sc.nodes.begin(), sc.nodes.end(), s) != sc.nodes.end()) p.node[key] = sc.id(s);
            else p.text[key] = s;
        } else if (value.is_boolean()) {
            p.number[key] = value.get<bool>() ? 1.0 : 0.0;
        } else if (value.is_number()) {
            p.number[key] = value.get<double>();
        } else if (value.is_array()) {
            std::vector<NodeId> ids;
            for (const auto& e : value) {
                if (!e.is_string()) throw InvalidArgument("parameter '" + key + "' must list node names");
                ids.push_back(sc.id(e.get<std::string>()));
            }
            p.nodes[key] = std::move(ids);
        } else {
            throw InvalidArgument("parameter '" + key + "' has an unsupported type");
        }
    }
    if (attack == "biased_metric" && p.text.contains("bias")) {
        if (p.text.at("bias") != "max") throw InvalidArgument("bias must be a number or \"max\"");
        if (!p.nodes.contains("route")) throw InvalidArgument("bias \"max\" needs the route the liars sit on");
        MaxBias mb;
        mb.route = p.nodes.at("route");
        mb.sign = p.number_or("sign", 1.0) < 0 ? -1 : 1;
        if (max_bias != nullptr) *max_bias = std::move(mb);
    }
    return adversary::attack(attack, p);
}

Scenario parse_scenario(std::string_view text_in) {
    json root;
    try {
        root = json::parse(text_in.begin(), text_in.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text_in, e.byte);
        std::string msg = e.what();
        if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
        throw ScenarioError(std::to_string(line) + ":" + std::to_string(col), msg);
    }
    need_object(root, "");
    reject_unknown(root, "", {"name", "description", "config", "mode", "nodes", "links", "keys", "metrics",
                              "adversaries", "discoveries", "expect"});
    Scenario sc;
    if (root.contains("name")) sc.name = text(root.at("name"), "/name");
    if (root.contains("description")) sc.description = text(root.at("description"), "/description");
    if (root.contains("mode")) {
        const std::string mode = text(root.at("mode"), "/mode");
        if (mode == "augmented") sc.augmented = true;
        else if (mode != "basic") fail("/mode", "expected basic or augmented");
    }
    read_config(sc, root);
    read_nodes(sc, root);
    read_links(sc, root);
    read_keys(sc, root);
    read_metrics(sc, root);
    read_adversaries(sc, root);
    read_discoveries(sc, root);
    read_expect(sc, root);
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError(path.string(), "cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    } catch (const ScenarioError& e) {
        const std::string where = e.where().empty() ? path.string() : path.string() + ":" + e.where();
        std::string what = e.what();
        if (!e.where().empty()) what = what.substr(e.where().size() + 2);
        throw ScenarioError(where, what);
    }
}

json to_json(const Scenario& sc) {
    auto name = [&](NodeId id) { return sc.name_of(id); };
    auto edge = [&](const sim::Edge& e) { return json::array({name(e.lo), name(e.hi)}); };
    json out;
    out["name"] = sc.name;
    if (!sc.description.empty()) out["description"] = sc.description;
    json cfg{{"tau", sc.config.tau},
             {"tx_time", sc.config.tx_time},
             {"seed", sc.config.seed},
             {"end_time", sc.config.end_time},
             {"radius", sc.config.radius},
             {"max_hops", sc.max_hops}};
    if (sc.reply_wait_min) cfg["reply_wait_min"] = *sc.reply_wait_min;
    if (sc.reply_wait_max) cfg["reply_wait_max"] = *sc.reply_wait_max;
    out["config"] = std::move(cfg);
    out["mode"] = sc.augmented ? "augmented" : "basic";
    out["nodes"] = sc.nodes;
    json links = json::array();
    for (const auto& [e, sched] : sc.topology.schedules()) {
        json up = json::array();
        for (const auto& iv : sched.up_intervals()) {
            up.push_back(json::array({iv.begin, std::isinf(iv.end) ? json(nullptr) : json(iv.end)}));
        }
        links.push_back(json{{"edge", edge(e)}, {"up", std::move(up)}});
    }
    out["links"] = std::move(links);
    json keys = json::array();
    for (const auto& [a, b] : sc.keys) keys.push_back(json::array({name(a), name(b)}));
    out["keys"] = std::move(keys);
    if (sc.metrics) {
        const auto& m = *sc.metrics;
        json jm{{"kind", std::string(qos::to_string(m.config.kind))},
                {"epsilon", qos::to_real(m.config.epsilon)},
                {"delta_tilde", qos::to_real(m.config.delta_tilde)},
                {"administrative", m.config.administrative},
                {"quantity", m.config.quantity}};
        json act = json::array();
        for (const auto& [e, v] : m.actual) act.push_back(json{{"edge", edge(e)}, {"value", v}});
        jm["actual"] = std::move(act);
        if (m.fallback) jm["default"] = *m.fallback;
        out["metrics"] = std::move(jm);
    }
    json advs = json::array();
    for (const auto& a : sc.adversaries) {
        json ja{{"node", name(a.node)}, {"class", std::string(adversary::to_string(a.cls))}};
        if (a.attack == "script") {
            ja["script"] = a.params.is_null() ? adversary::to_json(a.script, name) : a.params;
        } else {
            ja["attack"] = a.attack;
            ja["params"] = a.params;
        }
        if (a.demote) ja["demote"] = true;
        advs.push_back(std::move(ja));
    }
    out["adversaries"] = std::move(advs);
    json ds = json::array();
    for (const auto& d : sc.discoveries) ds.push_back(json{{"source", name(d.source)}, {"target", name(d.target)}, {"at", d.at}});
    out["discoveries"] = std::move(ds);
    json ex = json::array();
    for (const auto& e : sc.expect) {
        json je;
        if (e.is_count) je["accepted"] = e.op + std::to_string(e.count);
        else je[std::string(to_string(e.property))] = std::string(to_string(e.quantifier));
        if (e.with_link) je["with_link"] = edge(*e.with_link);
        if (e.since) je["since"] = *e.since;
        ex.push_back(std::move(je));
    }
    out["expect"] = std::move(ex);
    return out;
}

}  // namespace srpsim::harness
