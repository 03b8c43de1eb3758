#pragma once

#include "srpsim/adversary/script.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace srpsim::adversary {

// Resolved attack parameters. Node names are already mapped to ids.
struct AttackParams {
    std::map<std::string, NodeId> node;
    std::map<std::string, std::vector<NodeId>> nodes;
    std::map<std::string, double> number;
    std::map<std::string, std::string> text;

    NodeId need_node(const std::string& key, std::string_view attack) const;
    std::vector<NodeId> need_nodes(const std::string& key, std::string_view attack) const;
    double number_or(const std::string& key, double fallback) const;
    std::string text_or(const std::string& key, std::string fallback) const;
};

struct CatalogEntry {
    std::string_view name;
    bool arbitrary_only;
    std::string_view params;
    std::string_view summary;
};

const std::vector<CatalogEntry>& catalog();
bool is_catalog_attack(std::string_view name);

// Builds the named script. Throws InvalidArgument on an unknown name or a
// missing parameter.
AttackScript attack(std::string_view name, const AttackParams& params);

}  // namespace srpsim::adversary
