#pragma once

#include "srpsim/adversary/script.hpp"
#include "srpsim/identity/keyring.hpp"
#include "srpsim/qos/model.hpp"
#include "srpsim/sim/engine.hpp"
#include "srpsim/srp/protocol.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

namespace srpsim::adversary {

// One transmission by an adversary and the delivery that caused it
// (0 for at_time rules).
struct CausedTransmission {
    NodeId node;
    AdversaryClass cls;
    std::uint64_t cause = 0;
    bool cause_compliant = true;
    srp::Packet received;  // the causing message; unset payload for at_time
};

// Shared across all adversaries of one run.
struct AdversaryLog {
    std::set<std::uint64_t> noncompliant;  // delivery ids a checking adversary refused
    std::vector<CausedTransmission> transmissions;
    std::size_t dropped_noncompliant = 0;
};

// Whether `d` would pass the checks a correct node in `self`'s position runs.
// `observer` supplies ForwardLists and relay records; seen-state is ignored.
std::optional<srp::Discard> compliance(const srp::NodeState& observer, const sim::Delivery& d,
                                       const srp::ProtocolParams& params, const srp::MeasureFn& measure,
                                       const identity::Signer& signer);

class AdversaryAgent : public sim::Agent {
public:
    AdversaryAgent(NodeId self, AdversaryClass cls, AttackScript script, srp::ProtocolParams params,
                   const identity::Signer& signer, const qos::LinkMetricModel* model, std::uint64_t seed,
                   AdversaryLog* log);

    NodeId self() const noexcept { return state_.self; }
    AdversaryClass adversary_class() const noexcept { return cls_; }
    const AttackScript& script() const noexcept { return script_; }
    int budget_left() const noexcept { return budget_; }

    // Schedules at_time rules. Call once before Engine::run.
    void arm(sim::Engine& engine);

    void on_delivery(sim::Engine& engine, const sim::Delivery& delivery) override;
    void on_timer(sim::Engine& engine, std::uint64_t timer_id) override;

private:
    struct Context {
        std::size_t rule = 0;
        std::size_t next = 0;
        std::uint64_t cause = 0;
        bool cause_compliant = true;
        NodeId from;
        std::optional<srp::Packet> received;
        std::optional<srp::Packet> working;
    };

    // Value the adversary reports for a link: actual plus the script's bias.
    qos::Metric report(NodeId neighbour) const;
    // What a correct node here would measure; compliance is judged with it.
    qos::Metric honest(NodeId neighbour) const;
    void run_rule(sim::Engine& engine, Context ctx);
    // Returns false when the rule must stop.
    bool apply(sim::Engine& engine, Context& ctx, const Action& a);
    bool transmit(sim::Engine& engine, Context& ctx, const char* what);
    void note(sim::Engine& engine, const Context& ctx, const std::string& what, const std::string& detail);
    NodeId predecessor_of(const Context& ctx, const srp::Packet& p) const;

    srp::NodeState state_;
    AdversaryClass cls_;
    AttackScript script_;
    srp::ProtocolParams params_;
    const identity::Signer* signer_;
    const qos::LinkMetricModel* model_;
    std::uint64_t seed_;
    AdversaryLog* log_;
    int budget_;
    std::uint64_t forged_ = 0;
    std::set<std::tuple<std::size_t, NodeId, QueryId>> fired_;
    std::vector<srp::Packet> stored_;
    std::map<std::uint64_t, Context> waiting_;
};

}  // namespace srpsim::adversary
