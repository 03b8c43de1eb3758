#pragma once

#include "srpsim/qos/metric.hpp"
#include "srpsim/types.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace srpsim::adversary {

enum class AdversaryClass { independent, arbitrary };

std::string_view to_string(AdversaryClass c) noexcept;
AdversaryClass parse_class(std::string_view text);

enum class Trigger { rreq, rrep, overheard, tunnel_rreq, tunnel_rrep, at_time };

enum class Field { node_list, route, metric_list, qid };

enum class EditOp {
    append,       // node (lists) or value (metric_list)
    insert,       // at index
    remove,       // at index
    remove_node,  // every occurrence of node
    replace,      // at index
    add,          // metric_list[index] += value
    set,          // qid = index
};

struct Edit {
    Field field = Field::node_list;
    EditOp op = EditOp::append;
    int index = 0;  // negative counts from the end
    NodeId node;
    qos::Metric value = 0;

    bool operator==(const Edit&) const = default;
};

enum class ActionKind {
    drop,
    forward,           // RREQ: append_self + bcast; RREP: send_predecessor
    append_self,
    edit,
    bcast,
    send_to,
    send_source,
    send_predecessor,
    store,
    replay,            // load the latest stored message into the working copy
    forge_rrep,
    tunnel_send,
    wait,
    restore,           // working copy := received message
};

struct Action {
    ActionKind kind = ActionKind::drop;
    Edit edit;
    NodeId peer;
    std::vector<NodeId> path;       // tunnel relays between self and peer
    std::vector<NodeId> fake_tail;  // forge_rrep
    bool include_self = true;       // forge_rrep
    bool rewrite_qid = false;       // replay
    Time delay = 0;                 // wait

    bool operator==(const Action&) const = default;
};

struct Filter {
    std::optional<NodeId> from;
    std::optional<NodeId> src;
    std::optional<NodeId> dst;
    std::optional<int> min_len;
    std::optional<int> max_len;

    bool operator==(const Filter&) const = default;
};

struct Rule {
    Trigger trigger = Trigger::rreq;
    Time at = 0;  // at_time only
    Filter filter;
    std::vector<Action> actions;
    bool once_per_query = true;

    bool operator==(const Rule&) const = default;
};

struct AttackScript {
    std::string name = "custom";
    bool arbitrary_only = false;
    bool skip_checks = false;  // relay without running protocol checks
    int budget = 64;           // maximum transmissions
    qos::Metric bias = 0;      // measurement error used for every own metric
    std::vector<Rule> rules;

    bool operator==(const AttackScript&) const = default;
};

// True if the script needs the arbitrary class: tunnels or skipped checks.
bool requires_arbitrary(const AttackScript& script, std::string* why = nullptr);

// Throws InvalidArgument naming the violated class rule.
void validate(const AttackScript& script, AdversaryClass cls);

// Independent-class version of a script: checks are no longer skipped and
// tunnels become single-hop sends to the same peer.
AttackScript demote(AttackScript script);

// JSON form. Node references are names; resolvers map them both ways.
using NameToId = std::function<NodeId(const std::string&)>;
using IdToName = std::function<std::string(NodeId)>;

nlohmann::json to_json(const AttackScript& script, const IdToName& name_of);
// Throws InvalidArgument (with a path-like prefix) on malformed input.
AttackScript script_from_json(const nlohmann::json& j, const NameToId& id_of);

}  // namespace srpsim::adversary
