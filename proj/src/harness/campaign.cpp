#include "srpsim/harness/campaign.hpp"

#include "srpsim/adversary/fuzz.hpp"
#include "srpsim/harness/runner.hpp"
#include "srpsim/hash.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace srpsim::harness {

namespace {

std::vector<sim::Interval> churn(std::mt19937_64& rng, Time tx, Time end) {
    std::uniform_real_distribution<double> span(tx + 0.5, 45.0);
    std::vector<sim::Interval> up;
    Time t = 0;
    bool is_up = std::bernoulli_distribution(0.6)(rng);
    while (t < end) {
        const Time d = std::round(span(rng) * 10.0) / 10.0;
        if (is_up) up.push_back(sim::Interval{t, t + d});
        t += d;
        is_up = !is_up;
    }
    if (!up.empty() && up.back().end >= end) up.back().end = std::numeric_limits<double>::infinity();
    return up;
}

struct RunOutcome {
    std::uint64_t seed = 0;
    std::uint64_t digest = 0;
    std::size_t accepted = 0;
    std::size_t transmissions = 0;
    std::vector<Violation> violations;
};

RunOutcome one_run(std::uint64_t seed, const CampaignConfig& cfg) {
    RunOutcome out;
    out.seed = seed;
    const Scenario sc = random_scenario(seed, cfg);
    RunOptions opts;
    opts.seed = seed;
    opts.keep_trace = false;
    const RunResult r = run_scenario(sc, opts);
    out.digest = r.trace_digest;
    const bool independent = cfg.cls == adversary::AdversaryClass::independent;
    auto flag = [&](const char* property, const verify::Verdict& v) {
        out.violations.push_back(Violation{seed, property, verify::describe(v)});
    };
    for (const auto& v : r.verdicts) {
        if (v.endpoints_faulty) continue;
        ++out.accepted;
        if (!v.loop_free()) flag("loop_free", v);
        if (!v.auth_from_destination) flag("auth_from_destination", v);
        if (!v.weak.weakly_fresh) flag("weakly_fresh", v);
        if (independent && !v.fresh.fresh) flag("fresh", v);
        if (independent && v.accuracy && v.accuracy->evaluable && !v.accuracy->within) flag("accurate", v);
    }
    out.transmissions = r.adversary_log.transmissions.size();
    for (const auto& t : r.adversary_log.transmissions) {
        if (t.cls == adversary::AdversaryClass::independent && !t.cause_compliant) {
            out.violations.push_back(Violation{seed, "class_soundness",
                                               "node " + to_string(t.node) + " acted on delivery " +
                                                   std::to_string(t.cause) + " it should have refused"});
        }
    }
    return out;
}

}  // namespace

Scenario random_scenario(std::uint64_t seed, const CampaignConfig& cfg) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x7363656eULL));
    Scenario sc;
    sc.name = "campaign-" + std::to_string(seed);
    sc.config.seed = seed;
    sc.config.end_time = cfg.end_time;
    sc.augmented = cfg.augmented;
    const int lo = std::max(2, cfg.min_nodes);
    const int hi = std::max(lo, cfg.max_nodes);
    const int n = std::uniform_int_distribution<int>(lo, hi)(rng);
    sc.max_hops = n;
    sc.nodes.push_back("S");
    for (int i = 1; i + 1 < n; ++i) sc.nodes.push_back("V" + std::to_string(i));
    sc.nodes.push_back("T");
    const NodeId S{0};
    const NodeId T{static_cast<std::uint32_t>(n - 1)};

    std::vector<bool> faulty(static_cast<std::size_t>(n), false);
    std::bernoulli_distribution pick_adv(cfg.adversary_share);
    for (int i = 1; i + 1 < n; ++i) faulty[static_cast<std::size_t>(i)] = pick_adv(rng);

    std::set<sim::Edge> always_up;
    if (std::bernoulli_distribution(cfg.backbone_chance)(rng)) {
        std::vector<NodeId> correct;
        for (int i = 1; i + 1 < n; ++i) {
            if (!faulty[static_cast<std::size_t>(i)]) correct.push_back(NodeId{static_cast<std::uint32_t>(i)});
        }
        std::shuffle(correct.begin(), correct.end(), rng);
        const std::size_t keep =
            correct.empty() ? 0 : std::uniform_int_distribution<std::size_t>(1, correct.size())(rng);
        std::vector<NodeId> chain{S};
        chain.insert(chain.end(), correct.begin(), correct.begin() + static_cast<std::ptrdiff_t>(keep));
        chain.push_back(T);
        for (std::size_t i = 0; i + 1 < chain.size(); ++i) always_up.insert(sim::make_edge(chain[i], chain[i + 1]));
    }

    std::uniform_real_distribution<double> coord(0.0, 1.0);
    std::vector<std::pair<double, double>> pos;
    for (int i = 0; i < n; ++i) pos.emplace_back(coord(rng), coord(rng));
    const double radius = 0.6;
    std::uniform_real_distribution<double> value(1.0, 5.0);
    MetricSpec metrics;
    metrics.config.kind = cfg.kind;
    metrics.config.epsilon = qos::to_fixed(cfg.epsilon);
    metrics.config.delta_tilde = qos::to_fixed(cfg.delta_tilde);
    for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(n); ++a) {
        for (std::uint32_t b = a + 1; b < static_cast<std::uint32_t>(n); ++b) {
            const sim::Edge e{NodeId{a}, NodeId{b}};
            const double dx = pos[a].first - pos[b].first;
            const double dy = pos[a].second - pos[b].second;
            std::vector<sim::Interval> up;
            if (always_up.contains(e)) {
                up.push_back(sim::Interval{0, std::numeric_limits<double>::infinity()});
            } else if (std::hypot(dx, dy) < radius) {
                up = churn(rng, sc.config.tx_time, cfg.end_time);
            }
            const double v = std::round(value(rng) * 100.0) / 100.0;
            if (up.empty()) continue;
            sc.topology.add(sim::LinkSchedule(e, std::move(up)));
            metrics.actual.emplace_back(e, v);
        }
    }
    if (cfg.augmented) sc.metrics = std::move(metrics);
    sc.keys.emplace_back(S, T);

    adversary::FuzzBounds bounds;
    for (int i = 0; i < n; ++i) bounds.nodes.push_back(NodeId{static_cast<std::uint32_t>(i)});
    bounds.max_value = 4 * cfg.epsilon;
    for (int i = 1; i + 1 < n; ++i) {
        if (!faulty[static_cast<std::size_t>(i)]) continue;
        AdversarySpec a;
        a.node = NodeId{static_cast<std::uint32_t>(i)};
        a.cls = cfg.cls;
        a.attack = "script";
        a.script = adversary::fuzz_script(splitmix64(seed * 131 + static_cast<std::uint64_t>(i)), cfg.cls, bounds);
        a.params = adversary::to_json(a.script, [&](NodeId id) { return sc.name_of(id); });
        sc.adversaries.push_back(std::move(a));
    }
    sc.discoveries.push_back(DiscoverySpec{S, T, 1.0});
    sc.discoveries.push_back(DiscoverySpec{S, T, std::floor(cfg.end_time / 2)});
    return sc;
}

CampaignReport fuzz_campaign(const CampaignConfig& cfg) {
    std::vector<RunOutcome> outcomes(cfg.runs);
    std::atomic<std::size_t> next{0};
    unsigned threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, cfg.runs)));
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < cfg.runs; i = next++) {
                try {
                    outcomes[i] = one_run(cfg.seed + i, cfg);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mu);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);

    CampaignReport rep;
    Fnv1a digest;
    for (const auto& o : outcomes) {
        ++rep.runs;
        rep.accepted += o.accepted;
        rep.runs_with_accept += o.accepted > 0 ? 1 : 0;
        rep.adversary_transmissions += o.transmissions;
        const std::string d = hex64(o.digest);
        digest.update(d);
        for (const auto& v : o.violations) {
            if (v.property == "loop_free") ++rep.loop_violations;
            else if (v.property == "fresh") ++rep.fresh_violations;
            else if (v.property == "weakly_fresh") ++rep.weak_violations;
            else if (v.property == "accurate") ++rep.accuracy_violations;
            else if (v.property == "auth_from_destination") ++rep.auth_violations;
            else if (v.property == "class_soundness") ++rep.soundness_violations;
            rep.violations.push_back(v);
        }
    }
    rep.digest = digest.value();
    return rep;
}

std::string format_report(const CampaignConfig& cfg, const CampaignReport& r) {
    std::ostringstream out;
    out << "campaign class=" << adversary::to_string(cfg.cls) << " mode=" << (cfg.augmented ? "augmented" : "basic")
        << " runs=" << r.runs << " seed=" << cfg.seed << " nodes=" << cfg.min_nodes << ".." << cfg.max_nodes << "\n";
    out << "accepted=" << r.accepted << " runs_with_accept=" << r.runs_with_accept
        << " adversary_transmissions=" << r.adversary_transmissions << "\n";
    out << "violations loop_free=" << r.loop_violations << " fresh=" << r.fresh_violations
        << " weakly_fresh=" << r.weak_violations << " accurate=" << r.accuracy_violations
        << " auth=" << r.auth_violations << " class_soundness=" << r.soundness_violations << "\n";
    const std::size_t shown = std::min<std::size_t>(r.violations.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& v = r.violations[i];
        out << "violation seed=" << v.seed << " property=" << v.property << " " << v.detail << "\n";
    }
    if (shown < r.violations.size()) out << "... " << r.violations.size() - shown << " more\n";
    out << "digest " << hex64(r.digest) << "\n";
    return out.str();
}

}  // namespace srpsim::harness
