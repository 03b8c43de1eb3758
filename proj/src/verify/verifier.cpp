#include "srpsim/verify/verifier.hpp"

#include "srpsim/srp/messages.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>

namespace srpsim::verify {

std::optional<NodeId> repeated_node(const std::vector<NodeId>& route) {
    std::set<NodeId> seen;
    for (NodeId n : route) {
        if (!seen.insert(n).second) return n;
    }
    return std::nullopt;
}

Freshness check_fresh(const sim::Topology& topology, const std::vector<NodeId>& route, Time t1, Time t2) {
    Freshness out;
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        if (route[i] == route[i + 1] || !topology.up_within(route[i], route[i + 1], t1, t2)) {
            out.fresh = false;
            if (route[i] != route[i + 1]) out.never_up.push_back(sim::make_edge(route[i], route[i + 1]));
        }
    }
    return out;
}

namespace {

std::optional<std::vector<NodeId>> fresh_path(const sim::Topology& topology, NodeId from, NodeId to, Time t1,
                                              Time t2) {
    std::map<NodeId, NodeId> parent{{from, from}};
    std::deque<NodeId> frontier{from};
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop_front();
        if (u == to) break;
        for (NodeId v : topology.candidates(u)) {
            if (parent.contains(v) || !topology.up_within(u, v, t1, t2)) continue;
            parent.emplace(v, u);
            frontier.push_back(v);
        }
    }
    if (!parent.contains(to)) return std::nullopt;
    std::vector<NodeId> path{to};
    while (path.back() != from) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

WeakFreshness check_weakly_fresh(const sim::Topology& topology, const std::vector<NodeId>& route, Time t1, Time t2) {
    WeakFreshness out;
    const int n = static_cast<int>(route.size()) - 1;  // links
    if (n < 1) {
        out.weakly_fresh = false;
        return out;
    }
    std::vector<bool> link_fresh(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto a = route[static_cast<std::size_t>(i)];
        const auto b = route[static_cast<std::size_t>(i) + 1];
        link_fresh[static_cast<std::size_t>(i)] = a != b && topology.up_within(a, b, t1, t2);
    }
    if (std::all_of(link_fresh.begin(), link_fresh.end(), [](bool f) { return f; })) return out;
    out.weakly_fresh = false;
    if (n <= 2) return out;
    // Longest fresh prefix ends at V_jmax, longest fresh suffix starts at V_kmin.
    int jmax = 0;
    while (jmax < n && link_fresh[static_cast<std::size_t>(jmax)]) ++jmax;
    int kmin = n;
    while (kmin > 0 && link_fresh[static_cast<std::size_t>(kmin) - 1]) --kmin;
    // Tightest witness first: the longest fresh prefix and the longest fresh suffix.
    for (int j = std::min(jmax, n - 1); j >= 1; --j) {
        for (int k = std::max(kmin, j + 1); k <= n - 1; ++k) {
            auto path = fresh_path(topology, route[static_cast<std::size_t>(j)], route[static_cast<std::size_t>(k)],
                                   t1, t2);
            if (path) {
                out.weakly_fresh = true;
                out.j = j;
                out.k = k;
                out.detour = std::move(*path);
                return out;
            }
        }
    }
    return out;
}

Accuracy check_accuracy(const qos::LinkMetricModel& model, const std::vector<NodeId>& route,
                        const std::vector<qos::Metric>& reported) {
    Accuracy out;
    const std::size_t n = route.size() < 2 ? 0 : route.size() - 1;
    if (n == 0 || reported.size() != n) return out;
    std::vector<qos::Metric> actual;
    for (std::size_t i = 0; i < n; ++i) {
        if (route[i] == route[i + 1]) return out;
        auto w = model.actual_wire(sim::make_edge(route[i], route[i + 1]));
        if (!w) return out;
        actual.push_back(*w);
    }
    const auto& cfg = model.config();
    out.evaluable = true;
    out.reported = qos::aggregate(cfg.kind, reported);
    out.actual = qos::aggregate(cfg.kind, actual);
    out.error = out.reported - out.actual;
    out.bound = qos::delta_good_fixed(cfg.kind, static_cast<int>(n), cfg.epsilon, cfg.delta_tilde);
    out.within = std::llabs(out.error) < out.bound || (out.bound == 0 && out.error == 0);
    return out;
}

Verdict judge(const srp::RouteRecord& record, const sim::Topology& topology, const qos::LinkMetricModel* model,
              const identity::AuthLog& auth_log, const std::set<NodeId>& adversaries) {
    Verdict v;
    v.record = record;
    v.loop = repeated_node(record.route);
    v.fresh = check_fresh(topology, record.route, record.t1, record.t2);
    v.weak = check_weakly_fresh(topology, record.route, record.t1, record.t2);
    if (record.augmented && model != nullptr) v.accuracy = check_accuracy(*model, record.route, record.metrics);
    v.auth_issuers = auth_log.issuers(record.auth);
    v.auth_from_destination = v.auth_issuers == std::set<NodeId>{record.dst};
    v.endpoints_faulty = adversaries.contains(record.src) || adversaries.contains(record.dst);
    return v;
}

Summary summarize(const std::vector<Verdict>& verdicts) {
    Summary s;
    for (const auto& v : verdicts) {
        if (v.endpoints_faulty) {
            ++s.endpoints_faulty;
            continue;
        }
        ++s.accepted;
        s.loop_free += v.loop_free() ? 1 : 0;
        s.fresh += v.fresh.fresh ? 1 : 0;
        s.weakly_fresh += v.weak.weakly_fresh ? 1 : 0;
        s.auth_from_destination += v.auth_from_destination ? 1 : 0;
        if (v.accuracy && v.accuracy->evaluable) {
            ++s.accuracy_evaluated;
            s.accurate += v.accuracy->within ? 1 : 0;
            s.max_abs_error = std::max<qos::Metric>(s.max_abs_error, std::llabs(v.accuracy->error));
        }
    }
    return s;
}

std::string describe(const Verdict& v) {
    std::string out = "route=" + srp::join_nodes(v.record.route);
    out += " loop_free=" + std::string(v.loop_free() ? "yes" : "no");
    out += " fresh=" + std::string(v.fresh.fresh ? "yes" : "no");
    for (const auto& e : v.fresh.never_up) out += " stale_link=" + to_string(e.lo) + "-" + to_string(e.hi);
    out += " weakly_fresh=" + std::string(v.weak.weakly_fresh ? "yes" : "no");
    if (v.weak.weakly_fresh && !v.fresh.fresh) {
        out += " j=" + std::to_string(v.weak.j) + " k=" + std::to_string(v.weak.k) +
               " detour=" + srp::join_nodes(v.weak.detour);
    }
    if (v.accuracy) {
        if (v.accuracy->evaluable) {
            out += " error=" + std::to_string(v.accuracy->error) + " bound=" + std::to_string(v.accuracy->bound);
        } else {
            out += " accuracy=not-evaluable";
        }
    }
    out += " auth_from_T=" + std::string(v.auth_from_destination ? "yes" : "no");
    if (v.endpoints_faulty) out += " endpoints_faulty";
    return out;
}

}  // namespace srpsim::verify
