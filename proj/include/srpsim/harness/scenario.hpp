#pragma once

#include "srpsim/adversary/catalog.hpp"
#include "srpsim/adversary/script.hpp"
#include "srpsim/qos/model.hpp"
#include "srpsim/sim/engine.hpp"
#include "srpsim/sim/topology.hpp"
#include "srpsim/srp/node.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace srpsim::harness {

// biased_metric with bias "max": the bias is worked out per run from the
// noise of the neighbours on `route`.
struct MaxBias {
    std::vector<NodeId> route;
    int sign = 1;
};

struct AdversarySpec {
    NodeId node;
    adversary::AdversaryClass cls = adversary::AdversaryClass::independent;
    std::string attack;      // catalog name, or "script"
    nlohmann::json params;   // as written, kept for saving
    adversary::AttackScript script;
    bool demote = false;
    std::optional<MaxBias> max_bias;
};

struct DiscoverySpec {
    NodeId source;
    NodeId target;
    Time at = 0;
};

enum class Property { loop_free, fresh, weakly_fresh, accurate, exact, auth_from_destination };
enum class Quantifier { all, none, not_all, any };

std::string_view to_string(Property p) noexcept;
std::string_view to_string(Quantifier q) noexcept;

// One line of the `expect` block. Either a property with a quantifier over
// the selected routes, or a bound on how many routes were accepted.
struct Expectation {
    bool is_count = false;
    Property property = Property::loop_free;
    Quantifier quantifier = Quantifier::all;
    std::string op;  // "==", ">=", "<=", ">", "<" for counts
    std::size_t count = 0;
    std::optional<sim::Edge> with_link;  // only routes using this link
    std::optional<Time> since;           // only routes whose RREQ left at or after this time
    std::string text;
};

struct MetricSpec {
    qos::MetricConfig config;
    std::vector<std::pair<sim::Edge, double>> actual;
    std::optional<double> fallback;
};

struct Scenario {
    std::string name = "scenario";
    std::string description;
    sim::SimConfig config;
    std::optional<Time> reply_wait_min;
    std::optional<Time> reply_wait_max;
    int max_hops = 8;
    bool augmented = false;
    std::vector<std::string> nodes;
    sim::Topology topology;
    std::vector<std::pair<NodeId, NodeId>> keys;
    std::optional<MetricSpec> metrics;
    std::vector<AdversarySpec> adversaries;
    std::vector<DiscoverySpec> discoveries;
    std::vector<Expectation> expect;

    // Throws InvalidArgument for an unknown name.
    NodeId id(std::string_view name) const;
    std::string name_of(NodeId id) const;
    srp::ReplyWaitPolicy reply_wait() const;
    std::set<NodeId> adversary_nodes() const;
    const AdversarySpec* adversary_at(NodeId node) const;
};

// Throws ScenarioError: "line:col" for malformed JSON, a JSON pointer for
// anything that parses but does not validate.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& scenario);

// Builds the attack script of a catalog entry from JSON params whose node
// references are names.
adversary::AttackScript catalog_script(const Scenario& scenario, const std::string& attack, const nlohmann::json& params,
                                       std::optional<MaxBias>* max_bias);

}  // namespace srpsim::harness
