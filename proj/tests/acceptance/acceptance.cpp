// Acceptance run: one PASS/FAIL line per criterion. Every property below is
// judged with the reference computations in tests/support, not with the
// library's verifier.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "oracles.hpp"

#include "srpsim/adversary/catalog.hpp"
#include "srpsim/adversary/fuzz.hpp"
#include "srpsim/harness/campaign.hpp"
#include "srpsim/harness/runner.hpp"
#include "srpsim/hash.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace srpsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string scenario_dir = SRPSIM_SCENARIO_DIR;

harness::Scenario corpus(const std::string& name) { return harness::load_scenario(scenario_dir + "/" + name + ".json"); }

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(scenario_dir)) {
        if (e.path().extension() == ".json") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool uses_link(const std::vector<NodeId>& route, NodeId a, NodeId b) {
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        if ((route[i] == a && route[i + 1] == b) || (route[i] == b && route[i + 1] == a)) return true;
    }
    return false;
}

bool endpoints_correct(const harness::Scenario& sc, const srp::RouteRecord& r) {
    const auto adv = sc.adversary_nodes();
    return !adv.contains(r.src) && !adv.contains(r.dst);
}

harness::RunResult quiet_run(const harness::Scenario& sc, std::optional<std::uint64_t> seed = std::nullopt) {
    harness::RunOptions o;
    o.seed = seed;
    o.keep_trace = false;
    return harness::run_scenario(sc, o);
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---- 1: loop freedom ----

Outcome loop_freedom() {
    const auto start = std::chrono::steady_clock::now();
    std::size_t routes = 0;
    std::size_t repeats = 0;
    for (const auto& f : corpus_files()) {
        const auto sc = harness::load_scenario(f);
        for (const auto& rec : quiet_run(sc).accepted) {
            ++routes;
            repeats += oracle::repeats_node(rec.route) ? 1 : 0;
        }
    }
    const std::size_t corpus_routes = routes;
    harness::CampaignConfig cfg;
    cfg.cls = adversary::AdversaryClass::arbitrary;
    cfg.max_nodes = 8;
    std::size_t transmissions = 0;
    const std::size_t runs = 10000;
    for (std::size_t i = 0; i < runs; ++i) {
        cfg.augmented = i % 2 == 1;
        const auto sc = harness::random_scenario(1 + i, cfg);
        const auto r = quiet_run(sc, 1 + i);
        transmissions += r.adversary_log.transmissions.size();
        for (const auto& rec : r.accepted) {
            ++routes;
            repeats += oracle::repeats_node(rec.route) ? 1 : 0;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Outcome o;
    o.pass = repeats == 0 && secs < 300 && corpus_routes > 0 && routes > corpus_routes && transmissions > 0;
    o.detail = fmt("corpus_routes=%zu fuzz_runs=%zu routes=%zu repeated=%zu adversary_tx=%zu time=%.1fs",
                   corpus_routes, runs, routes, repeats, transmissions, secs);
    return o;
}

// ---- 2: attack families against a never-up victim link ----

Outcome attack_families() {
    const std::vector<std::string> families{"tamper_nodelist_downstream", "shortcut_relay", "tamper_nodelist_upstream",
                                            "tamper_rrep_route",          "impersonate_T",  "forge_rrep",
                                            "replay_stale_rrep",          "replay_stale_rrep_rewrite"};
    Outcome o;
    std::size_t scenarios = 0;
    std::size_t victim_routes = 0;
    std::string problems;
    for (const auto& fam : families) {
        for (const char* cls : {"_independent", "_arbitrary"}) {
            const auto sc = corpus(fam + cls);
            ++scenarios;
            const auto r = quiet_run(sc);
            // The victim link is the one named by an "accepted == 0" expectation.
            const harness::Expectation* victim = nullptr;
            for (const auto& e : sc.expect) {
                if (e.is_count && e.op == "==" && e.count == 0 && e.with_link) victim = &e;
            }
            if (victim == nullptr) {
                problems += " " + fam + cls + ":no-victim";
                continue;
            }
            const NodeId a = victim->with_link->lo;
            const NodeId b = victim->with_link->hi;
            const Time since = victim->since.value_or(0);
            if (oracle::link_fresh(sc.topology, a, b, since, sc.config.end_time + 1)) {
                problems += " " + fam + cls + ":victim-link-up";
            }
            if (r.adversary_log.transmissions.empty()) problems += " " + fam + cls + ":attack-idle";
            for (const auto& rec : r.accepted) {
                if (!endpoints_correct(sc, rec) || rec.t1 < since) continue;
                if (uses_link(rec.route, a, b)) {
                    ++victim_routes;
                    problems += " " + fam + cls + ":accepted-victim-route";
                }
            }
        }
    }
    // Independent fuzzing: every accepted route fresh.
    harness::CampaignConfig cfg;
    cfg.cls = adversary::AdversaryClass::independent;
    const std::size_t runs = 10000;
    std::size_t routes = 0;
    std::size_t stale = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        cfg.augmented = i % 2 == 1;
        const auto sc = harness::random_scenario(200000 + i, cfg);
        const auto r = quiet_run(sc, 200000 + i);
        for (const auto& rec : r.accepted) {
            if (!endpoints_correct(sc, rec)) continue;
            ++routes;
            if (!oracle::route_fresh(sc.topology, rec.route, rec.t1, rec.t2)) ++stale;
        }
    }
    o.pass = problems.empty() && victim_routes == 0 && stale == 0 && routes > 0;
    o.detail = fmt("family_scenarios=%zu victim_routes=%zu fuzz_runs=%zu routes=%zu not_fresh=%zu", scenarios,
                   victim_routes, runs, routes, stale) +
               (problems.empty() ? "" : " problems:" + problems);
    return o;
}

// ---- 3: wormhole and fabricated segment ----

struct PatternCount {
    std::size_t matching = 0;
    std::size_t accepted = 0;
    std::string note;
};

PatternCount fig_pattern(const std::string& name, const std::string& u, const std::string& v,
                         const std::vector<std::string>& detour_must_contain) {
    PatternCount out;
    const auto sc = corpus(name);
    const auto r = harness::run_scenario(sc);
    const NodeId a = sc.id(u);
    const NodeId b = sc.id(v);
    for (std::size_t i = 0; i < r.accepted.size(); ++i) {
        const auto& rec = r.accepted[i];
        if (!endpoints_correct(sc, rec)) continue;
        ++out.accepted;
        if (!uses_link(rec.route, a, b)) continue;
        const bool fresh = oracle::route_fresh(sc.topology, rec.route, rec.t1, rec.t2);
        const bool weak = oracle::weakly_fresh(sc.topology, rec.route, rec.t1, rec.t2);
        const bool loop_free = !oracle::repeats_node(rec.route);
        const auto& w = r.verdicts[i].weak;
        bool detour_ok = oracle::witness_valid(sc.topology, rec.route, rec.t1, rec.t2, w.j, w.k, w.detour);
        for (const auto& n : detour_must_contain) {
            detour_ok &= std::find(w.detour.begin(), w.detour.end(), sc.id(n)) != w.detour.end();
        }
        if (!fresh && weak && loop_free && detour_ok) {
            ++out.matching;
            std::string d;
            for (NodeId x : w.detour) d += (d.empty() ? "" : "-") + sc.name_of(x);
            out.note = "witness j=" + std::to_string(w.j) + " k=" + std::to_string(w.k) + " detour=" + d;
        }
    }
    return out;
}

Outcome wormholes() {
    Outcome o;
    const auto a = fig_pattern("fig1a_tunnel", "M1", "M2", {"Y1", "Y2"});
    const auto a_dem = fig_pattern("fig1a_tunnel_demoted", "M1", "M2", {});
    const auto b = fig_pattern("fig1b_chain", "M1", "F", {});
    const auto b_dem = fig_pattern("fig1b_chain_demoted", "M1", "F", {});
    const auto sc_b = corpus("fig1b_chain");
    const std::size_t colluders = sc_b.adversaries.size();
    // F never has a link, so any route through it carries a fabricated segment.
    bool f_isolated = sc_b.topology.candidates(sc_b.id("F")).empty();
    o.pass = a.matching >= 1 && b.matching >= 1 && a_dem.matching == 0 && b_dem.matching == 0 && colluders == 3 &&
             f_isolated;
    o.detail = fmt("fig1a=%zu fig1b(k=%zu)=%zu demoted_a=%zu demoted_b=%zu", a.matching, colluders, b.matching,
                   a_dem.matching, b_dem.matching) +
               " [fig1a " + a.note + "] [fig1b " + b.note + "]";
    return o;
}

// ---- 4a: accuracy under independent liars ----

Outcome accuracy_cells() {
    Outcome o;
    std::size_t cells = 0;
    std::size_t runs_total = 0;
    std::size_t routes = 0;
    std::size_t violations = 0;
    std::size_t max_liar_runs = 0;
    std::size_t max_only_runs = 0;
    std::size_t max_only_silent = 0;  // fuzzed liars may drop, max-bias liars must not
    std::size_t thin_cells = 0;
    double worst_ratio = 0;
    std::string worst;
    const int runs_per_cell = 1000;
    for (auto kind : {qos::GKind::add, qos::GKind::max, qos::GKind::min}) {
        for (int n = 2; n <= 6; ++n) {
            for (double eps : {0.01, 0.1}) {
                for (double dt : {0.0, eps / 2}) {
                    ++cells;
                    std::size_t cell_routes = 0;
                    std::mt19937_64 rng(splitmix64(static_cast<std::uint64_t>(kind) * 1000 + n * 10 +
                                                   (eps > 0.05 ? 1 : 0) * 5 + (dt > 0 ? 1 : 0)));
                    std::uniform_real_distribution<double> value(1.0, 5.0);
                    for (int run = 0; run < runs_per_cell; ++run) {
                        ++runs_total;
                        std::vector<double> actual;
                        for (int i = 0; i < n; ++i) actual.push_back(std::round(value(rng) * 100) / 100);
                        const std::uint64_t seed = rng();
                        auto sc = oracle::line_scenario(n, true, kind, eps, dt, actual, seed);
                        std::vector<NodeId> line;
                        for (int i = 0; i <= n; ++i) line.push_back(NodeId{static_cast<std::uint32_t>(i)});
                        const int sign = (rng() & 1) != 0 ? 1 : -1;
                        bool any_max = false;
                        bool any_fuzzed = false;
                        for (int i = 1; i < n; ++i) {
                            if ((rng() & 1) == 0 && n > 2) continue;  // every interior node lies when n == 2
                            harness::AdversarySpec a;
                            a.node = NodeId{static_cast<std::uint32_t>(i)};
                            a.cls = adversary::AdversaryClass::independent;
                            if (rng() % 5 != 0) {
                                a.attack = "biased_metric";
                                adversary::AttackParams p;
                                a.script = adversary::attack("biased_metric", p);
                                a.max_bias = harness::MaxBias{line, sign};
                                any_max = true;
                            } else {
                                a.attack = "script";
                                adversary::FuzzBounds b;
                                b.nodes = line;
                                b.max_value = 4 * eps;
                                a.script = adversary::fuzz_script(rng(), adversary::AdversaryClass::independent, b);
                                any_fuzzed = true;
                            }
                            sc.adversaries.push_back(std::move(a));
                        }
                        max_liar_runs += any_max ? 1 : 0;
                        const auto r = quiet_run(sc);
                        if (!any_fuzzed) {
                            ++max_only_runs;
                            max_only_silent += r.accepted.empty() ? 1 : 0;
                        }
                        for (const auto& rec : r.accepted) {
                            if (!endpoints_correct(sc, rec)) continue;
                            ++routes;
                            ++cell_routes;
                            if (rec.route != line || rec.metrics.size() != static_cast<std::size_t>(n)) {
                                ++violations;  // an independent liar cannot make another route here
                                continue;
                            }
                            std::vector<double> reported;
                            for (auto m : rec.metrics) reported.push_back(qos::to_real(m));
                            const double err =
                                oracle::route_metric(kind, reported) - oracle::route_metric(kind, actual);
                            const double bound = oracle::delta_good(kind, n, eps, dt);
                            const double ratio = std::fabs(err) / bound;
                            if (!(std::fabs(err) < bound)) ++violations;
                            if (ratio > worst_ratio) {
                                worst_ratio = ratio;
                                worst = fmt("%s n=%d eps=%g dt=%g err=%.6f bound=%.6f",
                                            std::string(qos::to_string(kind)).c_str(), n, eps, dt, err, bound);
                            }
                        }
                    }
                    if (cell_routes < runs_per_cell / 2) ++thin_cells;
                }
            }
        }
    }
    o.pass = cells == 60 && violations == 0 && thin_cells == 0 && max_liar_runs > 0 && max_only_silent == 0;
    o.detail = fmt("cells=%zu runs=%zu routes=%zu violations=%zu runs_with_max_liars=%zu "
                   "max_only_runs_without_route=%zu/%zu thin_cells=%zu worst_error/delta_good=%.3f",
                   cells, runs_total, routes, violations, max_liar_runs, max_only_silent, max_only_runs, thin_cells,
                   worst_ratio) +
               " (" + worst + ")";
    return o;
}

// ---- 4b: bound on the summed reporting error ----

Outcome sum_bound_brute_force() {
    Outcome o;
    const int n = 5;
    std::string d;
    for (double eps : {0.01, 0.1}) {
        for (double dt : {0.0, eps / 2}) {
            const double best = oracle::brute_force_max_error_sum(n, eps, dt);
            const double closed = eps * (n * n - 1) / 4.0 + (n - 1) * dt;
            const double lib = qos::sum_bound(n, eps, dt);
            const bool ok = best < closed && std::fabs(lib - closed) < 1e-12;
            o.pass &= ok;
            d += fmt(" eps=%g dt=%g max=%.5f bound=%.5f", eps, dt, best, closed);
        }
    }
    o.detail = "n=5 grid=eps/10" + d;
    return o;
}

// ---- 5: benign augmented run ----

Outcome benign_augmented() {
    Outcome o;
    const auto sc = corpus("benign_augmented");
    const auto r = harness::run_scenario(sc);
    bool ok = sc.metrics && sc.metrics->config.delta_tilde == 0 && sc.adversaries.empty() && !r.accepted.empty();
    std::map<std::pair<NodeId, NodeId>, double> actual;
    for (const auto& [e, v] : sc.metrics->actual) {
        actual[{e.lo, e.hi}] = v;
        actual[{e.hi, e.lo}] = v;
    }
    for (const auto& rec : r.accepted) {
        ok &= !oracle::repeats_node(rec.route);
        ok &= oracle::route_fresh(sc.topology, rec.route, rec.t1, rec.t2);
        ok &= rec.metrics.size() + 1 == rec.route.size();
        if (rec.metrics.size() + 1 != rec.route.size()) continue;
        for (std::size_t i = 0; i + 1 < rec.route.size(); ++i) {
            // delta_tilde = 0: every reported link is exact in fixed point.
            ok &= rec.metrics[i] == qos::to_fixed(actual.at({rec.route[i], rec.route[i + 1]}));
        }
    }
    for (const auto& v : r.verdicts) ok &= v.accuracy && v.accuracy->within && v.accuracy->error == 0;
    o.pass = ok;
    o.detail = fmt("accepted=%zu loop_free,fresh,exact=%s", r.accepted.size(), ok ? "yes" : "no");
    return o;
}

// ---- 6: step conformance, via the doctest cases named "step <label> ..." ----

std::map<std::string, std::pair<int, int>> step_results;  // label -> (ran, failed)

struct StepReporter : doctest::IReporter {
    explicit StepReporter(const doctest::ContextOptions&) {}
    std::string current;
    void report_query(const doctest::QueryData&) override {}
    void test_run_start() override {}
    void test_run_end(const doctest::TestRunStats&) override {}
    void test_case_start(const doctest::TestCaseData& tc) override {
        std::istringstream in(tc.m_name);
        std::string word;
        in >> word >> current;
    }
    void test_case_reenter(const doctest::TestCaseData&) override {}
    void test_case_end(const doctest::CurrentTestCaseStats& st) override {
        auto& e = step_results[current];
        ++e.first;
        if (!st.testCaseSuccess) ++e.second;
    }
    void test_case_exception(const doctest::TestCaseException&) override { ++step_results[current].second; }
    void subcase_start(const doctest::SubcaseSignature&) override {}
    void subcase_end() override {}
    void log_assert(const doctest::AssertData& a) override {
        if (a.m_failed) std::cerr << "  step " << current << " failed: " << a.m_expr << " at line " << a.m_line << "\n";
    }
    void log_message(const doctest::MessageData&) override {}
    void test_case_skipped(const doctest::TestCaseData&) override {}
};

REGISTER_REPORTER("steps", 1, StepReporter);

Outcome step_conformance() {
    const std::vector<std::string> labels{"2.2.1", "2.2.2", "2.2.3", "2.2.4", "2.2.5", "2.3.1",   "2.3.2",
                                          "2.3.3", "2.3.4", "4.1",   "4.2",   "4.3",   "4.4",     "4.5",
                                          "2.2.4.a", "2.3.4.a", "4.2.1", "4.2.2"};
    doctest::Context ctx;
    ctx.setOption("test-case", "step *");
    ctx.setOption("reporters", "steps");
    ctx.setOption("no-version", true);
    const int rc = ctx.run();
    Outcome o;
    std::size_t covered = 0;
    std::string missing;
    for (const auto& l : labels) {
        auto it = step_results.find(l);
        if (it == step_results.end() || it->second.first == 0) {
            missing += " " + l + ":missing";
        } else if (it->second.second > 0) {
            missing += " " + l + ":failed";
        } else {
            ++covered;
        }
    }
    o.pass = rc == 0 && covered == labels.size();
    o.detail = fmt("steps=%zu/%zu", covered, labels.size()) + missing;
    return o;
}

// ---- 7: determinism ----

Outcome determinism() {
    Outcome o;
    std::vector<harness::Scenario> cases;
    for (const auto& f : corpus_files()) cases.push_back(harness::load_scenario(f));
    harness::CampaignConfig cfg;
    std::uint64_t seed = 900000;
    while (cases.size() < 100) {
        cfg.cls = seed % 2 == 0 ? adversary::AdversaryClass::arbitrary : adversary::AdversaryClass::independent;
        cfg.augmented = seed % 3 == 0;
        cases.push_back(harness::random_scenario(seed++, cfg));
    }
    std::size_t same = 0;
    for (const auto& sc : cases) {
        const auto a = harness::run_scenario(sc);
        const auto b = harness::run_scenario(sc);
        Fnv1a fa;
        fa.update(a.trace_text);
        Fnv1a fb;
        fb.update(b.trace_text);
        const bool eq = a.trace_text == b.trace_text && fa.value() == fb.value() && a.accepted == b.accepted &&
                        a.trace_digest == b.trace_digest && !a.trace_text.empty();
        same += eq ? 1 : 0;
    }
    o.pass = same == cases.size() && cases.size() == 100;
    o.detail = fmt("pairs=%zu identical=%zu", cases.size(), same);
    return o;
}

// ---- 8: weak freshness against enumeration ----

Outcome weak_freshness_enumeration() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t checks = 0;
    std::size_t agree = 0;
    std::size_t weak_only = 0;
    std::size_t bad_witness = 0;
    for (int topo_i = 0; topo_i < 200; ++topo_i) {
        const int nodes = 3 + static_cast<int>(rng() % 4);  // 3..6
        sim::Topology topo;
        for (int a = 0; a < nodes; ++a) {
            for (int b = a + 1; b < nodes; ++b) {
                if (u(rng) < 0.3) continue;
                std::vector<sim::Interval> ivs;
                double t = u(rng) * 8;
                while (t < 40) {
                    const double len = 1 + u(rng) * 10;
                    ivs.push_back(sim::Interval{t, t + len});
                    t += len + 1 + u(rng) * 10;
                }
                topo.add(sim::LinkSchedule(sim::make_edge(NodeId{static_cast<std::uint32_t>(a)},
                                                          NodeId{static_cast<std::uint32_t>(b)}),
                                           ivs));
            }
        }
        for (int q = 0; q < 10; ++q) {
            std::vector<NodeId> perm;
            for (int i = 0; i < nodes; ++i) perm.push_back(NodeId{static_cast<std::uint32_t>(i)});
            std::shuffle(perm.begin(), perm.end(), rng);
            const std::size_t len = 2 + rng() % static_cast<std::size_t>(nodes - 1);
            const std::vector<NodeId> route(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(len));
            const double t1 = std::floor(u(rng) * 30);
            const double t2 = t1 + 1 + std::floor(u(rng) * 12);
            const auto w = verify::check_weakly_fresh(topo, route, t1, t2);
            const bool expect = oracle::weakly_fresh(topo, route, t1, t2);
            ++checks;
            agree += w.weakly_fresh == expect ? 1 : 0;
            if (w.weakly_fresh && !oracle::route_fresh(topo, route, t1, t2)) {
                ++weak_only;
                if (!oracle::witness_valid(topo, route, t1, t2, w.j, w.k, w.detour)) ++bad_witness;
            }
        }
    }
    o.pass = agree == checks && bad_witness == 0 && weak_only > 0;
    o.detail = fmt("topologies=200 checks=%zu agree=%zu weakly_fresh_not_fresh=%zu bad_witness=%zu", checks, agree,
                   weak_only, bad_witness);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) scenario_dir = argv[1];
    struct Criterion {
        const char* id;
        const char* name;
        Outcome (*fn)();
    };
    const Criterion all[] = {
        {"AC1", "loop freedom", loop_freedom},
        {"AC2", "attack families and independent freshness", attack_families},
        {"AC3", "wormhole and fabricated segment", wormholes},
        {"AC4a", "accuracy under independent liars", accuracy_cells},
        {"AC4b", "summed error bound by brute force", sum_bound_brute_force},
        {"AC5", "benign augmented exactness", benign_augmented},
        {"AC6", "step conformance", step_conformance},
        {"AC7", "determinism", determinism},
        {"AC8", "weak freshness vs enumeration", weak_freshness_enumeration},
    };
    int failed = 0;
    for (const auto& c : all) {
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.id << " " << c.name << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
