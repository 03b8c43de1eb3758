#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace srpsim {

// Simulation time in abstract units.
using Time = double;

struct NodeId {
    std::uint32_t value = 0;

    constexpr auto operator<=>(const NodeId&) const = default;
};

// Query identifier Q; unique per source.
struct QueryId {
    std::uint64_t value = 0;

    constexpr auto operator<=>(const QueryId&) const = default;
};

inline std::string to_string(NodeId id) { return std::to_string(id.value); }

}  // namespace srpsim

template <>
struct std::hash<srpsim::NodeId> {
    std::size_t operator()(srpsim::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
