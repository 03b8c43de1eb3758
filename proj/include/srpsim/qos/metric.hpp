#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srpsim::qos {

// Link metric in fixed point, 1 unit = 1e-6 metric units. Values on the wire
// and in every equality check use this encoding.
using Metric = std::int64_t;

inline constexpr double kMetricScale = 1e6;

Metric to_fixed(double value);
double to_real(Metric value) noexcept;

enum class GKind { add, max, min, mul };

std::string_view to_string(GKind kind) noexcept;
// Accepts "add", "g_add", ... Throws InvalidArgument.
GKind parse_gkind(std::string_view text);

// Route metric over real values. g_mul is computed as exp(sum(log m)).
// Throws InvalidArgument on an empty list or a non-positive g_mul input.
double route_metric(GKind kind, std::span<const double> metrics);

// Wire encoding of an actual link value: log-domain for g_mul.
Metric to_wire(GKind kind, double actual);

// Aggregate over wire values. For g_mul the wire is already log-domain, so
// the aggregate is a sum. Throws InvalidArgument on an empty list.
Metric aggregate(GKind kind, std::span<const Metric> wire);

// Accuracy tolerance for a route of n links.
double delta_good(GKind kind, int n, double epsilon, double delta_tilde);
Metric delta_good_fixed(GKind kind, int n, Metric epsilon, Metric delta_tilde);

// |own - reported| < epsilon, or exact equality in administrative mode.
bool check_metric_consistency(double own, double reported, double epsilon, bool administrative = false);
bool check_metric_consistency(Metric own, Metric reported, Metric epsilon, bool administrative = false) noexcept;

// Bound on the reporting error of the i-th node of an n-link route whose
// endpoints are correct: min(i, n - i) * epsilon + delta_tilde.
double per_hop_bound(int i, int n, double epsilon, double delta_tilde);
// Sum of per_hop_bound over i = 1 .. n-1, in closed form.
double sum_bound(int n, double epsilon, double delta_tilde);

}  // namespace srpsim::qos
