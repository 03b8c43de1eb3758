#pragma once

#include "srpsim/adversary/script.hpp"

#include <cstdint>
#include <vector>

namespace srpsim::adversary {

struct FuzzBounds {
    std::vector<NodeId> nodes;  // identities a script may reference
    int max_rules = 4;
    int max_actions = 6;
    Time max_wait = 4.0;
    Time max_at = 40.0;
    double max_value = 2.0;  // magnitude of metric edits and bias, real units
};

// Random script that is valid for `cls`. Independent scripts never skip
// checks and never use the tunnel.
AttackScript fuzz_script(std::uint64_t seed, AdversaryClass cls, const FuzzBounds& bounds);

}  // namespace srpsim::adversary
