#include "srpsim/adversary/catalog.hpp"
#include "srpsim/errors.hpp"
#include "srpsim/harness/campaign.hpp"
#include "srpsim/harness/runner.hpp"
#include "srpsim/harness/scenario.hpp"
#include "srpsim/hash.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace srpsim;

namespace {

constexpr int kPass = 0;
constexpr int kViolated = 1;
constexpr int kUsage = 2;

// SRPSIM_OUT_DIR, when set, replaces the working directory for outputs.
fs::path out_dir() {
    const char* env = std::getenv("SRPSIM_OUT_DIR");
    return env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
}

fs::path resolve_out(const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : out_dir() / path;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic simulator for secure route discovery under adversaries"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string trace_out;
    std::string verdicts_out;
    auto* run = app.add_subcommand("run", "run one scenario and check its expectations");
    run->add_option("scenario", scenario_path, "scenario file")->required()->check(CLI::ExistingFile);
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--trace", trace_out, "write the trace here");
    run->add_option("--verdicts", verdicts_out, "write the verdict report here");

    harness::CampaignConfig campaign;
    std::string cls = "arbitrary";
    std::string mode = "basic";
    std::string kind = "add";
    std::string failing_dir;
    auto* fuzz = app.add_subcommand("fuzz", "run a campaign of fuzzed adversaries on random topologies");
    fuzz->add_option("--runs", campaign.runs, "number of runs")->capture_default_str();
    fuzz->add_option("--class", cls, "adversary class")
        ->check(CLI::IsMember({"independent", "arbitrary"}))
        ->capture_default_str();
    fuzz->add_option("--mode", mode, "protocol mode")->check(CLI::IsMember({"basic", "augmented"}))->capture_default_str();
    fuzz->add_option("--max-nodes", campaign.max_nodes, "largest topology")->check(CLI::Range(2, 64))->capture_default_str();
    fuzz->add_option("--min-nodes", campaign.min_nodes, "smallest topology")->check(CLI::Range(2, 64))->capture_default_str();
    fuzz->add_option("--seed", campaign.seed, "first run seed")->capture_default_str();
    fuzz->add_option("--threads", campaign.threads, "worker threads, 0 for all cores")->capture_default_str();
    fuzz->add_option("--kind", kind, "route metric kind in augmented mode")
        ->check(CLI::IsMember({"add", "max", "min", "mul"}))
        ->capture_default_str();
    fuzz->add_option("--epsilon", campaign.epsilon, "consistency tolerance")->capture_default_str();
    fuzz->add_option("--delta-tilde", campaign.delta_tilde, "measurement error bound")->capture_default_str();
    fuzz->add_option("--save-failing", failing_dir, "write the scenario of every violating run into this directory");

    std::string check_trace_path;
    std::string check_scenario_path;
    auto* check = app.add_subcommand("check", "re-verify a stored trace against its scenario");
    check->add_option("trace", check_trace_path, "trace file")->required()->check(CLI::ExistingFile);
    check->add_option("scenario", check_scenario_path, "scenario file")->required()->check(CLI::ExistingFile);

    auto* list = app.add_subcommand("list-attacks", "print the attack catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }

    try {
        if (*list) {
            for (const auto& e : adversary::catalog()) {
                std::cout << e.name << (e.arbitrary_only ? " [arbitrary only]" : "") << "\n  params: " << e.params
                          << "\n  " << e.summary << "\n";
            }
            return kPass;
        }
        if (*run) {
            const harness::Scenario sc = harness::load_scenario(scenario_path);
            harness::RunOptions opts;
            opts.seed = seed;
            const auto result = harness::run_scenario(sc, opts);
            const std::string report = harness::verdict_report(sc, result);
            std::cout << report;
            const bool env_out = std::getenv("SRPSIM_OUT_DIR") != nullptr;
            const std::string stem = sc.name + "-" + std::to_string(result.seed);
            if (!trace_out.empty() || env_out) {
                write_file(resolve_out(trace_out.empty() ? stem + ".trace" : trace_out), result.trace_text);
            }
            if (!verdicts_out.empty() || env_out) {
                write_file(resolve_out(verdicts_out.empty() ? stem + ".verdicts" : verdicts_out), report);
            }
            return result.passed() ? kPass : kViolated;
        }
        if (*fuzz) {
            campaign.cls = adversary::parse_class(cls);
            campaign.augmented = mode == "augmented";
            campaign.kind = qos::parse_gkind(kind);
            if (campaign.min_nodes > campaign.max_nodes) campaign.min_nodes = campaign.max_nodes;
            const auto report = harness::fuzz_campaign(campaign);
            std::cout << harness::format_report(campaign, report);
            if (!failing_dir.empty()) {
                std::set<std::uint64_t> seeds;
                for (const auto& v : report.violations) seeds.insert(v.seed);
                for (auto s : seeds) {
                    const auto sc = harness::random_scenario(s, campaign);
                    write_file(resolve_out(failing_dir) / (sc.name + ".json"), harness::to_json(sc).dump(2) + "\n");
                }
            }
            return report.clean() ? kPass : kViolated;
        }
        if (*check) {
            const harness::Scenario sc = harness::load_scenario(check_scenario_path);
            const auto result = harness::check_trace(sc, read_file(check_trace_path));
            std::cout << "digest " << (result.digest_ok ? "ok" : "MISMATCH") << "\n";
            std::cout << "routes " << result.verdicts.size() << "\n";
            for (const auto& v : result.verdicts) std::cout << verify::describe(v) << "\n";
            for (const auto& e : result.expectations) {
                std::cout << "expect " << e.text << " " << (e.held ? "held" : "VIOLATED") << "\n";
            }
            return result.passed() ? kPass : kViolated;
        }
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
