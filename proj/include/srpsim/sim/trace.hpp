#pragma once

#include "srpsim/hash.hpp"
#include "srpsim/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace srpsim::sim {

std::string format_time(Time t);

// Line-per-event log. The digest covers every line (newline-terminated) in
// order and is maintained even when line storage is switched off.
class Trace {
public:
    explicit Trace(bool keep_lines = true) : keep_lines_(keep_lines) {}

    void add(std::string line);

    // "<time> <node> <primitive> <digest> <outcome>[ <extra>]"
    void transmission(Time t, NodeId node, std::string_view primitive, std::uint64_t packet_digest,
                      std::string_view outcome, std::string_view extra = {});
    // "<time> <node> step <label> <outcome>[ <detail>]"
    void step(Time t, NodeId node, std::string_view label, std::string_view outcome, std::string_view detail = {});

    const std::vector<std::string>& lines() const noexcept { return lines_; }
    std::size_t size() const noexcept { return count_; }
    std::uint64_t digest() const noexcept { return hash_.value(); }

    // All lines followed by "digest <hex16>".
    std::string text() const;

private:
    bool keep_lines_;
    std::vector<std::string> lines_;
    std::size_t count_ = 0;
    Fnv1a hash_;
};

// Recomputes the digest of a stored trace text. Returns false if the final
// digest line is missing or does not match.
bool verify_trace_text(std::string_view text, std::vector<std::string>* lines_out = nullptr,
                       std::uint64_t* digest_out = nullptr);

}  // namespace srpsim::sim
