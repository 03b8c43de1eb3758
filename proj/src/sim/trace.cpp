#include "srpsim/sim/trace.hpp"

#include <cstdio>
#include <optional>

namespace srpsim::sim {

std::string format_time(Time t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    return buf;
}

void Trace::add(std::string line) {
    hash_.update(line);
    hash_.update(std::string_view("\n"));
    ++count_;
    if (keep_lines_) lines_.push_back(std::move(line));
}

void Trace::transmission(Time t, NodeId node, std::string_view primitive, std::uint64_t packet_digest,
                         std::string_view outcome, std::string_view extra) {
    std::string line = format_time(t);
    line += ' ';
    line += to_string(node);
    line += ' ';
    line += primitive;
    line += ' ';
    line += hex64(packet_digest);
    line += ' ';
    line += outcome;
    if (!extra.empty()) {
        line += ' ';
        line += extra;
    }
    add(std::move(line));
}

void Trace::step(Time t, NodeId node, std::string_view label, std::string_view outcome, std::string_view detail) {
    std::string line = format_time(t);
    line += ' ';
    line += to_string(node);
    line += " step ";
    line += label;
    line += ' ';
    line += outcome;
    if (!detail.empty()) {
        line += ' ';
        line += detail;
    }
    add(std::move(line));
}

std::string Trace::text() const {
    std::string out;
    for (const auto& l : lines_) {
        out += l;
        out += '\n';
    }
    out += "digest ";
    out += hex64(digest());
    out += '\n';
    return out;
}

bool verify_trace_text(std::string_view text, std::vector<std::string>* lines_out, std::uint64_t* digest_out) {
    Fnv1a h;
    std::vector<std::string> lines;
    std::optional<std::uint64_t> claimed;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        if (claimed) return false;  // content after the digest line
        if (line.starts_with("digest ")) {
            std::uint64_t v = 0;
            if (!parse_hex64(line.substr(7), v)) return false;
            claimed = v;
            continue;
        }
        h.update(line);
        h.update(std::string_view("\n"));
        lines.emplace_back(line);
    }
    if (!claimed) return false;
    if (lines_out != nullptr) *lines_out = std::move(lines);
    if (digest_out != nullptr) *digest_out = h.value();
    return *claimed == h.value();
}

}  // namespace srpsim::sim
