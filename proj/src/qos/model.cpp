#include "srpsim/qos/model.hpp"

#include "srpsim/errors.hpp"
#include "srpsim/hash.hpp"

#include <algorithm>
#include <limits>

namespace srpsim::qos {

bool is_node_local_quantity(std::string_view quantity) noexcept {
    return quantity == "willingness" || quantity == "battery" || quantity == "remaining_battery" ||
           quantity == "willingness_to_relay";
}

LinkMetricModel::LinkMetricModel(MetricConfig config, std::uint64_t noise_seed)
    : config_(std::move(config)), noise_seed_(noise_seed) {
    if (config_.epsilon <= 0 && !config_.administrative) throw InvalidArgument("epsilon must be positive");
    if (config_.delta_tilde < 0) throw InvalidArgument("delta_tilde must be non-negative");
}

void LinkMetricModel::set_actual(sim::Edge edge, double value) {
    (void)to_wire(config_.kind, value);
    actual_[edge] = value;
}

void LinkMetricModel::set_default(double value) {
    (void)to_wire(config_.kind, value);
    default_ = value;
}

std::optional<double> LinkMetricModel::actual(sim::Edge edge) const {
    auto it = actual_.find(edge);
    if (it != actual_.end()) return it->second;
    return default_;
}

std::optional<Metric> LinkMetricModel::actual_wire(sim::Edge edge) const {
    auto v = actual(edge);
    if (!v) return std::nullopt;
    return to_wire(config_.kind, *v);
}

Metric LinkMetricModel::noise(NodeId node, sim::Edge edge) const {
    if (config_.administrative || config_.delta_tilde == 0) return 0;
    const std::uint64_t key = (static_cast<std::uint64_t>(edge.lo.value) << 32) | edge.hi.value;
    const std::uint64_t h = splitmix64(noise_seed_ ^ splitmix64(key ^ splitmix64(node.value + 0x51ed27ULL)));
    const auto span = static_cast<std::uint64_t>(2 * config_.delta_tilde + 1);
    return static_cast<Metric>(h % span) - config_.delta_tilde;
}

Metric LinkMetricModel::measure(NodeId node, sim::Edge edge) const {
    if (!edge.touches(node)) {
        throw InvalidArgument("node " + to_string(node) + " is not an endpoint of the measured link");
    }
    return actual_wire(edge).value_or(0) + noise(node, edge);
}

Metric LinkMetricModel::measure_biased(NodeId node, sim::Edge edge, Metric bias) const {
    if (!edge.touches(node)) {
        throw InvalidArgument("node " + to_string(node) + " is not an endpoint of the measured link");
    }
    return actual_wire(edge).value_or(0) + bias;
}

std::vector<Metric> extreme_feasible_biases(const LinkMetricModel& model, const std::vector<NodeId>& route,
                                            const std::vector<bool>& liar, int sign) {
    const auto n = route.size();
    if (n < 2 || liar.size() != n) throw InvalidArgument("route and liar mask must match and span one link");
    std::vector<Metric> out(n, 0);
    const int dir = sign < 0 ? -1 : 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!liar[i]) continue;
        // V_i reports link (V_{i-1}, V_i); only V_{i-1} checks that value,
        // against its own measurement l + noise.
        const Metric e = model.noise(route[i - 1], sim::make_edge(route[i - 1], route[i]));
        out[i] = model.config().administrative ? e : e + dir * (model.config().epsilon - 1);
    }
    return out;
}

}  // namespace srpsim::qos
