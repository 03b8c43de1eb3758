#include "srpsim/harness/runner.hpp"

#include "srpsim/hash.hpp"
#include "srpsim/srp/node.hpp"

#include <algorithm>
#include <charconv>
#include <memory>
#include <sstream>

namespace srpsim::harness {

bool RunResult::passed() const noexcept {
    return std::all_of(expectations.begin(), expectations.end(), [](const auto& e) { return e.held; });
}

bool CheckResult::passed() const noexcept {
    return digest_ok && std::all_of(expectations.begin(), expectations.end(), [](const auto& e) { return e.held; });
}

std::uint64_t noise_seed_for(std::uint64_t seed) noexcept { return splitmix64(seed ^ 0x6e6f697365ULL); }

qos::LinkMetricModel build_model(const Scenario& sc, std::uint64_t seed) {
    if (!sc.metrics) return qos::LinkMetricModel{};
    qos::LinkMetricModel model(sc.metrics->config, noise_seed_for(seed));
    for (const auto& [e, v] : sc.metrics->actual) model.set_actual(e, v);
    if (sc.metrics->fallback) model.set_default(*sc.metrics->fallback);
    return model;
}

void resolve_max_bias(std::vector<AdversarySpec>& advs, const qos::LinkMetricModel& model) {
    for (auto& a : advs) {
        if (!a.max_bias) continue;
        const auto& route = a.max_bias->route;
        auto at = std::find(route.begin(), route.end(), a.node);
        if (route.size() < 2 || at == route.end()) {
            a.script.bias = 0;
            continue;
        }
        std::vector<bool> liar(route.size(), false);
        for (std::size_t i = 0; i < route.size(); ++i) {
            liar[i] = std::any_of(advs.begin(), advs.end(),
                                  [&](const AdversarySpec& o) { return o.node == route[i] && o.max_bias; });
        }
        const auto biases = qos::extreme_feasible_biases(model, route, liar, a.max_bias->sign);
        a.script.bias = biases[static_cast<std::size_t>(at - route.begin())];
    }
}

namespace {

bool uses_link(const std::vector<NodeId>& route, const sim::Edge& e) {
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        if ((route[i] == e.lo && route[i + 1] == e.hi) || (route[i] == e.hi && route[i + 1] == e.lo)) return true;
    }
    return false;
}

srp::ProtocolParams protocol_params(const Scenario& sc) {
    srp::ProtocolParams p;
    p.augmented = sc.augmented;
    if (sc.metrics) {
        p.kind = sc.metrics->config.kind;
        p.epsilon = sc.metrics->config.epsilon;
        p.administrative = sc.metrics->config.administrative;
    }
    return p;
}

identity::KeyRing key_ring(const Scenario& sc) {
    identity::KeyRing keys;
    for (const auto& [a, b] : sc.keys) keys.declare(a, b);
    return keys;
}

std::string names(const Scenario& sc, const std::vector<NodeId>& ids) {
    std::string out;
    for (NodeId id : ids) {
        if (!out.empty()) out += "-";
        out += sc.name_of(id);
    }
    return out.empty() ? "-" : out;
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
    RunResult r;
    r.seed = options.seed.value_or(sc.config.seed);
    sim::SimConfig cfg = sc.config;
    cfg.seed = r.seed;

    const identity::KeyRing keys = key_ring(sc);
    identity::AuthLog auth_log;
    const identity::Signer signer(keys, &auth_log);
    std::optional<qos::LinkMetricModel> model;
    if (sc.metrics) model = build_model(sc, r.seed);
    std::vector<AdversarySpec> advs = sc.adversaries;
    if (model) resolve_max_bias(advs, *model);
    const srp::ProtocolParams params = protocol_params(sc);
    const srp::ReplyWaitPolicy policy = sc.reply_wait();
    const qos::LinkMetricModel* model_ptr = model ? &*model : nullptr;

    sim::Engine engine(cfg, sc.topology, sc.nodes.size(), options.keep_trace);
    // The seed fixes measurement noise, so a stored trace must carry it.
    engine.trace().add(sim::format_time(0) + " - run seed=" + std::to_string(r.seed));
    std::vector<std::unique_ptr<sim::Agent>> agents;
    std::vector<adversary::AdversaryAgent*> armed;
    for (std::uint32_t i = 0; i < sc.nodes.size(); ++i) {
        const NodeId self{i};
        auto adv = std::find_if(advs.begin(), advs.end(), [&](const AdversarySpec& a) { return a.node == self; });
        if (adv != advs.end()) {
            auto agent = std::make_unique<adversary::AdversaryAgent>(
                self, adv->cls, adv->script, params, signer, model_ptr, splitmix64(r.seed ^ (0xad00ULL + i)),
                &r.adversary_log);
            armed.push_back(agent.get());
            agents.push_back(std::move(agent));
        } else {
            srp::MeasureFn measure = [model_ptr, self](NodeId nb) -> qos::Metric {
                if (model_ptr == nullptr || nb == self) return 0;
                return model_ptr->measure(self, sim::make_edge(self, nb));
            };
            agents.push_back(std::make_unique<srp::SrpNode>(self, params, policy, signer, std::move(measure), &r.accepted));
        }
        engine.attach(self, *agents.back());
    }
    for (auto* a : armed) a->arm(engine);
    for (const auto& d : sc.discoveries) engine.schedule_action(d.source, d.at, d.target);
    engine.run();

    r.events = engine.events_processed();
    r.trace_digest = engine.trace().digest();
    if (options.keep_trace) r.trace_text = engine.trace().text();
    const auto adversaries = sc.adversary_nodes();
    for (const auto& rec : r.accepted) {
        r.verdicts.push_back(verify::judge(rec, sc.topology, model_ptr, auth_log, adversaries));
    }
    r.summary = verify::summarize(r.verdicts);
    r.expectations = evaluate(sc.expect, r.verdicts);
    return r;
}

bool has_property(const verify::Verdict& v, Property p) {
    switch (p) {
        case Property::loop_free: return v.loop_free();
        case Property::fresh: return v.fresh.fresh;
        case Property::weakly_fresh: return v.weak.weakly_fresh;
        case Property::accurate: return v.accuracy && v.accuracy->evaluable && v.accuracy->within;
        case Property::exact: return v.accuracy && v.accuracy->evaluable && v.accuracy->error == 0;
        case Property::auth_from_destination: return v.auth_from_destination;
    }
    return false;
}

std::vector<ExpectationResult> evaluate(const std::vector<Expectation>& expect,
                                        const std::vector<verify::Verdict>& verdicts) {
    std::vector<ExpectationResult> out;
    for (const auto& e : expect) {
        ExpectationResult r;
        r.text = e.text;
        for (const auto& v : verdicts) {
            if (v.endpoints_faulty) continue;
            if (e.with_link && !uses_link(v.record.route, *e.with_link)) continue;
            if (e.since && v.record.t1 < *e.since) continue;
            ++r.selected;
            if (!e.is_count && has_property(v, e.property)) ++r.matching;
        }
        if (e.is_count) {
            const std::size_t n = r.selected;
            if (e.op == "==") r.held = n == e.count;
            else if (e.op == ">=") r.held = n >= e.count;
            else if (e.op == "<=") r.held = n <= e.count;
            else if (e.op == ">") r.held = n > e.count;
            else if (e.op == "<") r.held = n < e.count;
        } else {
            switch (e.quantifier) {
                case Quantifier::all: r.held = r.matching == r.selected; break;
                case Quantifier::none: r.held = r.matching == 0; break;
                case Quantifier::not_all: r.held = r.selected > 0 && r.matching < r.selected; break;
                case Quantifier::any: r.held = r.matching > 0; break;
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string adversary_class_label(const Scenario& sc) {
    bool ind = false;
    bool arb = false;
    for (const auto& a : sc.adversaries) {
        (a.cls == adversary::AdversaryClass::independent ? ind : arb) = true;
    }
    if (ind && arb) return "mixed";
    if (arb) return "arbitrary";
    if (ind) return "independent";
    return "benign";
}

namespace {

void report_verdicts(std::ostream& out, const Scenario& sc, const std::vector<verify::Verdict>& verdicts) {
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const auto& v = verdicts[i];
        out << "route " << i << " S=" << sc.name_of(v.record.src) << " T=" << sc.name_of(v.record.dst)
            << " Q=" << v.record.qid.value << " t1=" << sim::format_time(v.record.t1)
            << " t2=" << sim::format_time(v.record.t2) << " path=" << names(sc, v.record.route)
            << " loop_free=" << (v.loop_free() ? "yes" : "no") << " fresh=" << (v.fresh.fresh ? "yes" : "no")
            << " weakly_fresh=" << (v.weak.weakly_fresh ? "yes" : "no");
        for (const auto& e : v.fresh.never_up) out << " stale_link=" << sc.name_of(e.lo) << "-" << sc.name_of(e.hi);
        if (v.weak.weakly_fresh && !v.fresh.fresh) {
            out << " witness_j=" << v.weak.j << " witness_k=" << v.weak.k << " detour=" << names(sc, v.weak.detour);
        }
        if (v.accuracy) {
            if (v.accuracy->evaluable) {
                out << " metric_error=" << qos::to_real(v.accuracy->error)
                    << " delta_good=" << qos::to_real(v.accuracy->bound)
                    << " accurate=" << (v.accuracy->within ? "yes" : "no");
            } else {
                out << " accurate=not-evaluable";
            }
        }
        out << " auth_from_T=" << (v.auth_from_destination ? "yes" : "no");
        if (v.endpoints_faulty) out << " endpoints_faulty";
        out << "\n";
    }
}

void report_expectations(std::ostream& out, const std::vector<ExpectationResult>& results) {
    for (const auto& e : results) {
        out << "expect " << e.text << " " << (e.held ? "held" : "VIOLATED") << " selected=" << e.selected
            << " matching=" << e.matching << "\n";
    }
}

}  // namespace

std::string verdict_report(const Scenario& sc, const RunResult& r) {
    std::ostringstream out;
    out << "scenario " << sc.name << " seed=" << r.seed << " digest=" << hex64(r.trace_digest) << "\n";
    report_verdicts(out, sc, r.verdicts);
    const auto& s = r.summary;
    out << "summary class=" << adversary_class_label(sc) << " accepted=" << s.accepted << " loop_free=" << s.loop_free
        << " fresh=" << s.fresh << " weakly_fresh=" << s.weakly_fresh << " auth_from_T=" << s.auth_from_destination
        << " accurate=" << s.accurate << "/" << s.accuracy_evaluated
        << " max_abs_error=" << qos::to_real(s.max_abs_error) << " endpoints_faulty=" << s.endpoints_faulty << "\n";
    report_expectations(out, r.expectations);
    out << "result " << (r.passed() ? "pass" : "fail") << "\n";
    return out.str();
}

CheckResult check_trace(const Scenario& sc, std::string_view trace_text) {
    CheckResult out;
    std::vector<std::string> lines;
    out.digest_ok = sim::verify_trace_text(trace_text, &lines);
    const identity::KeyRing keys = key_ring(sc);
    const identity::AuthLog empty_log;
    std::uint64_t seed = sc.config.seed;
    for (const auto& line : lines) {
        const auto at = line.find(" - run seed=");
        if (at == std::string::npos) continue;
        const std::string_view digits = std::string_view(line).substr(at + 12);
        std::from_chars(digits.data(), digits.data() + digits.size(), seed);
        break;
    }
    std::optional<qos::LinkMetricModel> model;
    if (sc.metrics) model = build_model(sc, seed);
    const auto adversaries = sc.adversary_nodes();
    for (const auto& line : lines) {
        auto rec = srp::parse_accept(line);
        if (!rec) continue;
        auto v = verify::judge(*rec, sc.topology, model ? &*model : nullptr, empty_log, adversaries);
        if (keys.holds(rec->dst, rec->src) && rec->route.size() >= 2) {
            const std::vector<NodeId> rrep_route(rec->route.rbegin() + 1, rec->route.rend() - 1);
            const std::vector<qos::Metric> ml(rec->metrics.rbegin(), rec->metrics.rend());
            const auto fields = srp::reply_fields(rec->src, rec->dst, rec->qid, rrep_route, rec->augmented ? &ml : nullptr);
            if (keys.f_k(rec->dst, rec->src, fields) == rec->auth) {
                v.auth_issuers = {rec->dst};
                v.auth_from_destination = true;
            }
        }
        out.verdicts.push_back(std::move(v));
    }
    out.expectations = evaluate(sc.expect, out.verdicts);
    return out;
}

}  // namespace srpsim::harness
