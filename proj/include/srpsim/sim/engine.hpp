#pragma once

#include "srpsim/sim/topology.hpp"
#include "srpsim/sim/trace.hpp"
#include "srpsim/srp/messages.hpp"

#include <cstdint>
#include <queue>
#include <random>
#include <variant>
#include <vector>

namespace srpsim::sim {

struct SimConfig {
    double radius = 1.0;  // nominal only; connectivity comes from schedules
    Time tau = 2.0;
    Time tx_time = 1.0;
    std::uint64_t seed = 1;
    Time end_time = 100.0;

    // Throws InvalidArgument.
    void validate() const;
};

enum class DeliveryKind { broadcast, unicast, overheard, tunnel };

std::string_view to_string(DeliveryKind kind) noexcept;

struct Delivery {
    std::uint64_t id = 0;
    DeliveryKind kind = DeliveryKind::broadcast;
    NodeId transmitter;  // link-layer sender of the final hop
    NodeId receiver;
    NodeId addressee;    // unicast target; equals receiver unless overheard
    NodeId origin;       // tunnel entry point; equals transmitter otherwise
    srp::Packet packet;
    Time sent_at = 0;
};

struct FailureReport {
    NodeId sender;
    NodeId receiver;
    srp::Packet packet;
};

class Engine;

class Agent {
public:
    virtual ~Agent() = default;
    virtual void on_delivery(Engine& engine, const Delivery& delivery) = 0;
    virtual void on_failure(Engine&, const FailureReport&) {}
    virtual void on_timer(Engine&, std::uint64_t /*timer_id*/) {}
    // Upper-layer request to discover a route to `target`.
    virtual void on_action(Engine&, NodeId /*target*/) {}
};

class Engine {
public:
    Engine(SimConfig config, const Topology& topology, std::size_t node_count, bool keep_trace_lines = true);

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    void attach(NodeId node, Agent& agent);

    Time now() const noexcept { return now_; }
    const SimConfig& config() const noexcept { return config_; }
    const Topology& topology() const noexcept { return *topology_; }
    std::size_t node_count() const noexcept { return agents_.size(); }
    Trace& trace() noexcept { return trace_; }
    const Trace& trace() const noexcept { return trace_; }

    // One delivery per neighbour whose link stays up for the whole window.
    void bcast_l(NodeId sender, const srp::Packet& packet);
    // Delivery to `receiver` or a failure report back to the sender; other
    // neighbours in range get an overheard notification.
    void send_l(NodeId sender, NodeId receiver, const srp::Packet& packet);
    // Multi-hop opaque relay along path = {origin, relays..., peer}. Each hop
    // must be up for its own window, in sequence; otherwise the packet is lost.
    void tunnel_send(const std::vector<NodeId>& path, const srp::Packet& packet);

    std::uint64_t set_timer(NodeId node, Time delay);
    void schedule_action(NodeId node, Time at, NodeId target);

    // Processes events in (time, seq) order up to and including end_time.
    void run();

    std::uint64_t events_processed() const noexcept { return processed_; }

private:
    struct TimerFire {
        NodeId node;
        std::uint64_t id;
    };
    struct NodeAction {
        NodeId node;
        NodeId target;
    };
    struct LinkChange {
        Edge edge;
        bool up;
    };
    using Payload = std::variant<Delivery, FailureReport, TimerFire, NodeAction, LinkChange>;

    struct Event {
        Time time;
        std::uint64_t seq;
        Payload payload;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept {
            return a.time > b.time || (a.time == b.time && a.seq > b.seq);
        }
    };

    void push(Time at, Payload payload);
    Time draw_delay();
    void check_node(NodeId node, const char* what) const;
    void dispatch(const Event& ev);

    SimConfig config_;
    const Topology* topology_;
    std::vector<Agent*> agents_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::mt19937_64 rng_;
    Trace trace_;
    Time now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t next_timer_ = 1;
    std::uint64_t next_delivery_ = 1;
    std::uint64_t processed_ = 0;
};

}  // namespace srpsim::sim
