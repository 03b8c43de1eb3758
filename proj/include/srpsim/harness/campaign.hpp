#pragma once

#include "srpsim/adversary/script.hpp"
#include "srpsim/harness/scenario.hpp"
#include "srpsim/qos/metric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srpsim::harness {

struct CampaignConfig {
    std::size_t runs = 1000;
    std::uint64_t seed = 1;  // run i uses seed + i
    adversary::AdversaryClass cls = adversary::AdversaryClass::arbitrary;
    bool augmented = false;
    int min_nodes = 4;
    int max_nodes = 8;
    double adversary_share = 0.35;  // chance for each interior node
    double backbone_chance = 0.9;   // chance of an always-up correct S-T path
    qos::GKind kind = qos::GKind::add;
    double epsilon = 0.1;
    double delta_tilde = 0.05;
    Time end_time = 150.0;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct Violation {
    std::uint64_t seed = 0;
    std::string property;
    std::string detail;
};

struct CampaignReport {
    std::size_t runs = 0;
    std::size_t accepted = 0;          // routes with correct endpoints
    std::size_t runs_with_accept = 0;
    std::size_t loop_violations = 0;
    std::size_t fresh_violations = 0;  // independent class only
    std::size_t weak_violations = 0;
    std::size_t accuracy_violations = 0;  // independent class, augmented mode
    std::size_t auth_violations = 0;
    std::size_t soundness_violations = 0;  // independent action caused by a refused message
    std::size_t adversary_transmissions = 0;
    std::vector<Violation> violations;     // every violation, in seed order
    std::uint64_t digest = 0;              // over per-run trace digests, in seed order

    bool clean() const noexcept { return violations.empty(); }
};

// Random topology with churn, adversaries with fuzzed scripts, and two
// S -> T discoveries. S and T are always correct.
Scenario random_scenario(std::uint64_t seed, const CampaignConfig& config);

CampaignReport fuzz_campaign(const CampaignConfig& config);

std::string format_report(const CampaignConfig& config, const CampaignReport& report);

}  // namespace srpsim::harness
