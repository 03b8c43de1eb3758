#pragma once

#include "srpsim/adversary/agent.hpp"
#include "srpsim/harness/scenario.hpp"
#include "srpsim/srp/route_record.hpp"
#include "srpsim/verify/verifier.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace srpsim::harness {

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides config.seed
    bool keep_trace = true;             // keep the lines; the digest is always computed
};

struct ExpectationResult {
    std::string text;
    bool held = false;
    std::size_t selected = 0;  // routes the expectation looked at
    std::size_t matching = 0;  // of those, how many had the property
};

struct RunResult {
    std::uint64_t seed = 0;
    std::vector<srp::RouteRecord> accepted;
    std::vector<verify::Verdict> verdicts;
    verify::Summary summary;
    std::string trace_text;
    std::uint64_t trace_digest = 0;
    std::uint64_t events = 0;
    adversary::AdversaryLog adversary_log;
    std::vector<ExpectationResult> expectations;

    bool passed() const noexcept;
};

// Noise seed of the link metric model for a run seed.
std::uint64_t noise_seed_for(std::uint64_t seed) noexcept;

qos::LinkMetricModel build_model(const Scenario& scenario, std::uint64_t seed);

// Biases of every biased_metric "max" adversary for this run.
void resolve_max_bias(std::vector<AdversarySpec>& adversaries, const qos::LinkMetricModel& model);

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

bool has_property(const verify::Verdict& v, Property p);
std::vector<ExpectationResult> evaluate(const std::vector<Expectation>& expect,
                                        const std::vector<verify::Verdict>& verdicts);

// "benign", "independent", "arbitrary" or "mixed".
std::string adversary_class_label(const Scenario& scenario);

// Per-route lines, the summary and one line per expectation.
std::string verdict_report(const Scenario& scenario, const RunResult& result);

// Re-verifies a stored trace against the scenario's schedules and metrics.
// Provenance is recomputed: an authenticator counts as the destination's
// when it equals f_K(S, T, Q, Route[, MetricList]) under the scenario keys.
struct CheckResult {
    bool digest_ok = false;
    std::vector<verify::Verdict> verdicts;
    std::vector<ExpectationResult> expectations;
    bool passed() const noexcept;
};
CheckResult check_trace(const Scenario& scenario, std::string_view trace_text);

}  // namespace srpsim::harness
