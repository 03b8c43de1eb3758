#pragma once

#include "srpsim/identity/keyring.hpp"
#include "srpsim/sim/engine.hpp"
#include "srpsim/srp/protocol.hpp"
#include "srpsim/srp/route_record.hpp"

#include <map>
#include <vector>

namespace srpsim::srp {

struct ReplyWaitPolicy {
    Time min = 16.0;
    Time max = 256.0;

    // Defaults: min = 4 * tau * max_hops, max = 16 * min.
    static ReplyWaitPolicy defaults(Time tau, int max_hops);
    // Doubling after a failed discovery, clamped to [min, max].
    Time after_failure(Time previous) const;
    void validate() const;
};

// A correct node running SRP (basic or augmented).
class SrpNode : public sim::Agent {
public:
    SrpNode(NodeId self, ProtocolParams params, ReplyWaitPolicy policy, const identity::Signer& signer,
            MeasureFn measure, std::vector<RouteRecord>* sink);

    const NodeState& state() const noexcept { return state_; }
    NodeState& state() noexcept { return state_; }

    void on_delivery(sim::Engine& engine, const sim::Delivery& delivery) override;
    void on_timer(sim::Engine& engine, std::uint64_t timer_id) override;
    void on_action(sim::Engine& engine, NodeId target) override;

private:
    struct TimerInfo {
        NodeId target;
        QueryId qid;
        bool conclude;
    };

    void start(sim::Engine& engine, NodeId target);
    void conclude(sim::Engine& engine, NodeId target);
    void handle_rreq(sim::Engine& engine, const Rreq& rreq, NodeId transmitter);
    void handle_rrep(sim::Engine& engine, const Rrep& rrep, NodeId transmitter);
    void discard(sim::Engine& engine, const Discard& d);

    NodeState state_;
    ProtocolParams params_;
    ReplyWaitPolicy policy_;
    const identity::Signer* signer_;
    MeasureFn measure_;
    std::vector<RouteRecord>* sink_;
    std::map<std::uint64_t, TimerInfo> timers_;
};

}  // namespace srpsim::srp
