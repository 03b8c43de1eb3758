#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace oracle {

using srpsim::qos::GKind;
namespace sim = srpsim::sim;

bool repeats_node(const std::vector<NodeId>& route) {
    for (std::size_t a = 0; a < route.size(); ++a) {
        for (std::size_t b = a + 1; b < route.size(); ++b) {
            if (route[a].value == route[b].value) return true;
        }
    }
    return false;
}

bool link_fresh(const sim::Topology& topo, NodeId u, NodeId v, Time t1, Time t2) {
    if (!(t1 < t2)) return false;
    for (const auto& [edge, sched] : topo.schedules()) {
        const bool same = (edge.lo == u && edge.hi == v) || (edge.lo == v && edge.hi == u);
        if (!same) continue;
        for (const auto& iv : sched.up_intervals()) {
            // Some t in (t1, t2) with begin <= t < end.
            const bool hit = iv.begin > t1 ? (iv.begin < t2 && iv.begin < iv.end) : (t1 < iv.end);
            if (hit) return true;
        }
    }
    return false;
}

bool route_fresh(const sim::Topology& topo, const std::vector<NodeId>& route, Time t1, Time t2) {
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        if (!link_fresh(topo, route[i], route[i + 1], t1, t2)) return false;
    }
    return true;
}

namespace {

std::vector<NodeId> all_nodes(const sim::Topology& topo, const std::vector<NodeId>& route) {
    std::vector<NodeId> out = route;
    for (const auto& [edge, sched] : topo.schedules()) {
        out.push_back(edge.lo);
        out.push_back(edge.hi);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool links_fresh(const sim::Topology& topo, const std::vector<NodeId>& route, std::size_t from, std::size_t to,
                 Time t1, Time t2) {
    for (std::size_t i = from; i < to; ++i) {
        if (!link_fresh(topo, route[i], route[i + 1], t1, t2)) return false;
    }
    return true;
}

// Calls visit(path) for every simple path from a to b over fresh links.
void each_simple_path(const sim::Topology& topo, const std::vector<NodeId>& nodes, NodeId a, NodeId b, Time t1,
                      Time t2, const std::function<void(const std::vector<NodeId>&)>& visit) {
    std::vector<NodeId> path{a};
    std::function<void()> dfs = [&] {
        const NodeId at = path.back();
        if (at == b) {
            visit(path);
            return;
        }
        for (NodeId next : nodes) {
            if (std::find(path.begin(), path.end(), next) != path.end()) continue;
            if (!link_fresh(topo, at, next, t1, t2)) continue;
            path.push_back(next);
            dfs();
            path.pop_back();
        }
    };
    dfs();
}

}  // namespace

std::size_t witness_count(const sim::Topology& topo, const std::vector<NodeId>& route, Time t1, Time t2) {
    const std::size_t n = route.size() - 1;
    const auto nodes = all_nodes(topo, route);
    std::size_t count = 0;
    for (std::size_t j = 1; j + 1 <= n - 1 && n >= 3; ++j) {
        if (!links_fresh(topo, route, 0, j, t1, t2)) continue;
        for (std::size_t k = j + 1; k <= n - 1; ++k) {
            if (!links_fresh(topo, route, k, n, t1, t2)) continue;
            each_simple_path(topo, nodes, route[j], route[k], t1, t2, [&](const std::vector<NodeId>&) { ++count; });
        }
    }
    return count;
}

bool weakly_fresh(const sim::Topology& topo, const std::vector<NodeId>& route, Time t1, Time t2) {
    if (route.size() < 2) return false;
    if (route.size() - 1 <= 2) return route_fresh(topo, route, t1, t2);
    return witness_count(topo, route, t1, t2) > 0;
}

bool witness_valid(const sim::Topology& topo, const std::vector<NodeId>& route, Time t1, Time t2, int j, int k,
                   const std::vector<NodeId>& detour) {
    const int n = static_cast<int>(route.size()) - 1;
    if (!(1 <= j && j < k && k <= n - 1)) return false;
    if (!links_fresh(topo, route, 0, static_cast<std::size_t>(j), t1, t2)) return false;
    if (!links_fresh(topo, route, static_cast<std::size_t>(k), static_cast<std::size_t>(n), t1, t2)) return false;
    if (detour.size() < 2 || detour.front() != route[static_cast<std::size_t>(j)] ||
        detour.back() != route[static_cast<std::size_t>(k)]) {
        return false;
    }
    return route_fresh(topo, detour, t1, t2);
}

double route_metric(GKind kind, const std::vector<double>& links) {
    if (links.empty()) throw std::invalid_argument("empty route");
    double acc = links.front();
    for (std::size_t i = 1; i < links.size(); ++i) {
        switch (kind) {
            case GKind::add: acc = acc + links[i]; break;
            case GKind::mul: acc = acc * links[i]; break;
            case GKind::max: acc = links[i] > acc ? links[i] : acc; break;
            case GKind::min: acc = links[i] < acc ? links[i] : acc; break;
        }
    }
    return acc;
}

double delta_good(GKind kind, int n, double eps, double dt) {
    if (kind == GKind::max || kind == GKind::min) return n * eps + dt;
    return static_cast<double>(n) * n * eps + n * dt;
}

double brute_force_max_error_sum(int n, double eps, double dt) {
    // Work in integer grid steps of eps/10 so the strict inequality is exact.
    const int step_limit = 9;  // |k_i - k_{i-1}| < 10
    const int end_limit = static_cast<int>(std::floor(dt / (eps / 10.0) + 1e-9));
    std::vector<int> k(static_cast<std::size_t>(n) + 1, 0);
    long best = std::numeric_limits<long>::min();
    std::function<void(int, long)> dfs = [&](int i, long sum) {
        if (i == n) {
            for (int last = -end_limit; last <= end_limit; ++last) {
                if (std::abs(last - k[static_cast<std::size_t>(n) - 1]) <= step_limit) {
                    best = std::max(best, sum);
                    return;
                }
            }
            return;
        }
        for (int d = -step_limit; d <= step_limit; ++d) {
            const int v = k[static_cast<std::size_t>(i) - 1] + d;
            k[static_cast<std::size_t>(i)] = v;
            dfs(i + 1, sum + v);
        }
    };
    for (int first = -end_limit; first <= end_limit; ++first) {
        k[0] = first;
        dfs(1, 0);
    }
    return static_cast<double>(best) * (eps / 10.0);
}

srpsim::harness::Scenario line_scenario(int links, bool augmented, GKind kind, double eps, double dt,
                                        const std::vector<double>& actual, std::uint64_t seed) {
    srpsim::harness::Scenario sc;
    sc.name = "line" + std::to_string(links);
    sc.config.seed = seed;
    sc.config.end_time = 120;
    sc.reply_wait_min = 40;
    sc.augmented = augmented;
    sc.nodes.push_back("S");
    for (int i = 1; i < links; ++i) sc.nodes.push_back("V" + std::to_string(i));
    sc.nodes.push_back("T");
    srpsim::harness::MetricSpec spec;
    spec.config.kind = kind;
    spec.config.epsilon = srpsim::qos::to_fixed(eps);
    spec.config.delta_tilde = srpsim::qos::to_fixed(dt);
    for (int i = 0; i < links; ++i) {
        const sim::Edge e{NodeId{static_cast<std::uint32_t>(i)}, NodeId{static_cast<std::uint32_t>(i + 1)}};
        sc.topology.add(sim::LinkSchedule(e, {sim::Interval{0, std::numeric_limits<double>::infinity()}}));
        spec.actual.emplace_back(e, actual.at(static_cast<std::size_t>(i)));
    }
    if (augmented) sc.metrics = spec;
    const NodeId S{0};
    const NodeId T{static_cast<std::uint32_t>(links)};
    sc.keys.emplace_back(S, T);
    sc.discoveries.push_back(srpsim::harness::DiscoverySpec{S, T, 1.0});
    return sc;
}

}  // namespace oracle
