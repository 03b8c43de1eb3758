#include "srpsim/adversary/catalog.hpp"
#include "srpsim/errors.hpp"
#include "srpsim/harness/campaign.hpp"
#include "srpsim/harness/runner.hpp"
#include "srpsim/harness/scenario.hpp"
#include "srpsim/hash.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace srpsim;

namespace {

harness::Scenario load(const std::string& path_or_json) {
    // A leading brace means scenario text rather than a file name.
    const auto first = path_or_json.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && path_or_json[first] == '{') return harness::parse_scenario(path_or_json);
    return harness::load_scenario(path_or_json);
}

py::list names(const harness::Scenario& sc, const std::vector<NodeId>& route) {
    py::list out;
    for (NodeId n : route) out.append(sc.name_of(n));
    return out;
}

py::dict verdict_dict(const harness::Scenario& sc, const verify::Verdict& v) {
    py::dict d;
    d["source"] = sc.name_of(v.record.src);
    d["target"] = sc.name_of(v.record.dst);
    d["route"] = names(sc, v.record.route);
    d["t1"] = v.record.t1;
    d["t2"] = v.record.t2;
    d["loop_free"] = v.loop_free();
    d["fresh"] = v.fresh.fresh;
    d["weakly_fresh"] = v.weak.weakly_fresh;
    if (v.weak.weakly_fresh && !v.fresh.fresh) d["witness"] = names(sc, v.weak.detour);
    d["auth_from_destination"] = v.auth_from_destination;
    d["endpoints_faulty"] = v.endpoints_faulty;
    if (v.accuracy && v.accuracy->evaluable) {
        d["error"] = qos::to_real(v.accuracy->error);
        d["bound"] = qos::to_real(v.accuracy->bound);
        d["accurate"] = v.accuracy->within;
    }
    return d;
}

py::list expectation_list(const std::vector<harness::ExpectationResult>& results) {
    py::list out;
    for (const auto& e : results) {
        py::dict d;
        d["text"] = e.text;
        d["held"] = e.held;
        out.append(d);
    }
    return out;
}

py::dict run(const std::string& scenario, std::optional<std::uint64_t> seed, bool trace) {
    const auto sc = load(scenario);
    harness::RunOptions opts;
    opts.seed = seed;
    opts.keep_trace = trace;
    harness::RunResult r;
    {
        py::gil_scoped_release release;
        r = harness::run_scenario(sc, opts);
    }
    py::dict d;
    d["name"] = sc.name;
    d["seed"] = r.seed;
    d["passed"] = r.passed();
    d["digest"] = hex64(r.trace_digest);
    d["events"] = r.events;
    py::list verdicts;
    for (const auto& v : r.verdicts) verdicts.append(verdict_dict(sc, v));
    d["verdicts"] = verdicts;
    d["expectations"] = expectation_list(r.expectations);
    if (trace) d["trace"] = r.trace_text;
    return d;
}

py::dict check(const std::string& trace_text, const std::string& scenario) {
    const auto sc = load(scenario);
    const auto c = harness::check_trace(sc, trace_text);
    py::dict d;
    d["digest_ok"] = c.digest_ok;
    d["passed"] = c.passed();
    py::list verdicts;
    for (const auto& v : c.verdicts) verdicts.append(verdict_dict(sc, v));
    d["verdicts"] = verdicts;
    d["expectations"] = expectation_list(c.expectations);
    return d;
}

py::dict fuzz(std::size_t runs, const std::string& cls, const std::string& mode, int max_nodes, std::uint64_t seed,
              const std::string& kind) {
    harness::CampaignConfig cfg;
    cfg.runs = runs;
    cfg.cls = adversary::parse_class(cls);
    if (mode != "basic" && mode != "augmented") throw std::invalid_argument("mode is 'basic' or 'augmented'");
    cfg.augmented = mode == "augmented";
    cfg.max_nodes = max_nodes;
    cfg.min_nodes = std::min(cfg.min_nodes, max_nodes);
    cfg.seed = seed;
    cfg.kind = qos::parse_gkind(kind);
    harness::CampaignReport rep;
    {
        py::gil_scoped_release release;
        rep = harness::fuzz_campaign(cfg);
    }
    py::dict d;
    d["runs"] = rep.runs;
    d["accepted"] = rep.accepted;
    d["loop_violations"] = rep.loop_violations;
    d["fresh_violations"] = rep.fresh_violations;
    d["accuracy_violations"] = rep.accuracy_violations;
    d["auth_violations"] = rep.auth_violations;
    d["soundness_violations"] = rep.soundness_violations;
    d["adversary_transmissions"] = rep.adversary_transmissions;
    d["clean"] = rep.clean();
    d["digest"] = hex64(rep.digest);
    d["report"] = harness::format_report(cfg, rep);
    return d;
}

py::list list_attacks() {
    py::list out;
    for (const auto& e : adversary::catalog()) {
        py::dict d;
        d["name"] = std::string(e.name);
        d["arbitrary_only"] = e.arbitrary_only;
        d["params"] = std::string(e.params);
        d["summary"] = std::string(e.summary);
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_srpsim, m) {
    m.doc() = "Route discovery simulator: scenario runs, trace checks and fuzz campaigns";
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    m.def("run", &run, py::arg("scenario"), py::arg("seed") = py::none(), py::arg("trace") = false,
          "Run a scenario given as a file path or JSON text.");
    m.def("check", &check, py::arg("trace"), py::arg("scenario"), "Re-verify trace text against its scenario.");
    m.def("fuzz", &fuzz, py::arg("runs") = 1000, py::arg("cls") = "arbitrary", py::arg("mode") = "basic",
          py::arg("max_nodes") = 8, py::arg("seed") = 1, py::arg("kind") = "add");
    m.def("list_attacks", &list_attacks);
}
