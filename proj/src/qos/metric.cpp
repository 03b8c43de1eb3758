#include "srpsim/qos/metric.hpp"

#include "srpsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace srpsim::qos {

Metric to_fixed(double value) {
    if (!std::isfinite(value)) throw InvalidArgument("metric value is not finite");
    return static_cast<Metric>(std::llround(value * kMetricScale));
}

double to_real(Metric value) noexcept { return static_cast<double>(value) / kMetricScale; }

std::string_view to_string(GKind kind) noexcept {
    switch (kind) {
        case GKind::add: return "add";
        case GKind::max: return "max";
        case GKind::min: return "min";
        case GKind::mul: return "mul";
    }
    return "?";
}

GKind parse_gkind(std::string_view text) {
    if (text.starts_with("g_")) text.remove_prefix(2);
    if (text == "add") return GKind::add;
    if (text == "max") return GKind::max;
    if (text == "min") return GKind::min;
    if (text == "mul") return GKind::mul;
    throw InvalidArgument("unknown route metric kind '" + std::string(text) + "'");
}

double route_metric(GKind kind, std::span<const double> metrics) {
    if (metrics.empty()) throw InvalidArgument("route metric of an empty list");
    switch (kind) {
        case GKind::add: return std::accumulate(metrics.begin(), metrics.end(), 0.0);
        case GKind::max: return *std::max_element(metrics.begin(), metrics.end());
        case GKind::min: return *std::min_element(metrics.begin(), metrics.end());
        case GKind::mul: {
            double logs = 0.0;
            for (double m : metrics) {
                if (!(m > 0.0)) throw InvalidArgument("g_mul requires strictly positive metrics");
                logs += std::log(m);
            }
            return std::exp(logs);
        }
    }
    throw InvalidArgument("bad metric kind");
}

Metric to_wire(GKind kind, double actual) {
    if (kind == GKind::mul) {
        if (!(actual > 0.0)) throw InvalidArgument("g_mul requires strictly positive metrics");
        return to_fixed(std::log(actual));
    }
    return to_fixed(actual);
}

Metric aggregate(GKind kind, std::span<const Metric> wire) {
    if (wire.empty()) throw InvalidArgument("aggregate of an empty metric list");
    switch (kind) {
        case GKind::add:
        case GKind::mul: return std::accumulate(wire.begin(), wire.end(), Metric{0});
        case GKind::max: return *std::max_element(wire.begin(), wire.end());
        case GKind::min: return *std::min_element(wire.begin(), wire.end());
    }
    throw InvalidArgument("bad metric kind");
}

double delta_good(GKind kind, int n, double epsilon, double delta_tilde) {
    const double nn = n;
    switch (kind) {
        case GKind::add:
        case GKind::mul: return nn * nn * epsilon + nn * delta_tilde;
        case GKind::max:
        case GKind::min: return nn * epsilon + delta_tilde;
    }
    return 0.0;
}

Metric delta_good_fixed(GKind kind, int n, Metric epsilon, Metric delta_tilde) {
    const Metric nn = n;
    switch (kind) {
        case GKind::add:
        case GKind::mul: return nn * nn * epsilon + nn * delta_tilde;
        case GKind::max:
        case GKind::min: return nn * epsilon + delta_tilde;
    }
    return 0;
}

bool check_metric_consistency(double own, double reported, double epsilon, bool administrative) {
    if (administrative) return own == reported;
    return std::fabs(own - reported) < epsilon;
}

bool check_metric_consistency(Metric own, Metric reported, Metric epsilon, bool administrative) noexcept {
    if (administrative) return own == reported;
    const Metric diff = own > reported ? own - reported : reported - own;
    return diff < epsilon;
}

double per_hop_bound(int i, int n, double epsilon, double delta_tilde) {
    return std::min(i, n - i) * epsilon + delta_tilde;
}

double sum_bound(int n, double epsilon, double delta_tilde) {
    const double nn = n;
    const double eps_part = (n % 2 == 1) ? epsilon * (nn * nn - 1.0) / 4.0 : epsilon * nn * nn / 4.0;
    return eps_part + (nn - 1.0) * delta_tilde;
}

}  // namespace srpsim::qos
