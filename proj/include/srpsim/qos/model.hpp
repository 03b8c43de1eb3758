#pragma once

#include "srpsim/qos/metric.hpp"
#include "srpsim/sim/topology.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace srpsim::qos {

struct MetricConfig {
    GKind kind = GKind::add;
    Metric epsilon = to_fixed(0.1);
    Metric delta_tilde = 0;
    bool administrative = false;
    std::string quantity = "cost";
};

// Quantities a single node decides on its own; two endpoints cannot agree on
// them, so they are refused at load time.
bool is_node_local_quantity(std::string_view quantity) noexcept;

// Ground-truth link values plus the measurement model of correct nodes.
class LinkMetricModel {
public:
    LinkMetricModel() = default;
    LinkMetricModel(MetricConfig config, std::uint64_t noise_seed);

    const MetricConfig& config() const noexcept { return config_; }
    std::uint64_t noise_seed() const noexcept { return noise_seed_; }

    // Throws InvalidArgument on a non-positive value under g_mul.
    void set_actual(sim::Edge edge, double value);
    void set_default(double value);

    std::optional<double> actual(sim::Edge edge) const;
    std::optional<Metric> actual_wire(sim::Edge edge) const;
    const std::map<sim::Edge, double>& actual_values() const noexcept { return actual_; }
    std::optional<double> default_value() const noexcept { return default_; }

    // Seeded error of `node` on `edge`, uniform over [-delta_tilde, delta_tilde];
    // zero in administrative mode.
    Metric noise(NodeId node, sim::Edge edge) const;

    // Correct node's measurement of an incident edge. Throws InvalidArgument
    // if `node` is not an endpoint.
    Metric measure(NodeId node, sim::Edge edge) const;

    // Measurement of a node that adds a fixed bias instead of noise.
    Metric measure_biased(NodeId node, sim::Edge edge, Metric bias) const;

private:
    MetricConfig config_{};
    std::uint64_t noise_seed_ = 0;
    std::map<sim::Edge, double> actual_;
    std::optional<double> default_;
};

// Largest biases (by magnitude, in direction `sign`) that measurement liars
// on `route` can add to the link they report while the upstream neighbour's
// consistency check still passes. Entry i is zero for correct nodes and the
// endpoints. Uses the neighbours' actual noise, so this is an oracle for
// tests, not something a real node could compute.
std::vector<Metric> extreme_feasible_biases(const LinkMetricModel& model, const std::vector<NodeId>& route,
                                            const std::vector<bool>& liar, int sign);

}  // namespace srpsim::qos
