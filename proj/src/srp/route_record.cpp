#include "srpsim/srp/route_record.hpp"

#include "srpsim/hash.hpp"
#include "srpsim/sim/trace.hpp"
#include "srpsim/srp/messages.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace srpsim::srp {

namespace {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
bool parse_int(std::string_view s, T& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

template <class T, class F>
bool parse_list(std::string_view s, std::vector<T>& out, F convert) {
    out.clear();
    if (s == "-") return true;
    while (!s.empty()) {
        const auto comma = s.find(',');
        const auto item = s.substr(0, comma);
        T v{};
        if (!convert(item, v)) return false;
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return true;
}

}  // namespace

std::string format_accept(const RouteRecord& r) {
    std::string line = sim::format_time(r.t2) + " " + to_string(r.src) + " accept S=" + to_string(r.src) +
                       " T=" + to_string(r.dst) + " Q=" + std::to_string(r.qid.value) + " t1=" + g17(r.t1) +
                       " t2=" + g17(r.t2) + " route=" + join_nodes(r.route) +
                       " mode=" + (r.augmented ? "augmented" : "basic") + " metrics=" + join_metrics(r.metrics) +
                       " auth=" + hex64(r.auth.digest);
    return line;
}

std::optional<RouteRecord> parse_accept(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::string time, node, word;
    if (!(in >> time >> node >> word) || word != "accept") return std::nullopt;
    RouteRecord r;
    bool have[9] = {};
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) return std::nullopt;
        const std::string_view key = std::string_view(tok).substr(0, eq);
        const std::string_view val = std::string_view(tok).substr(eq + 1);
        bool ok = true;
        if (key == "S") {
            ok = parse_int(val, r.src.value), have[0] = true;
        } else if (key == "T") {
            ok = parse_int(val, r.dst.value), have[1] = true;
        } else if (key == "Q") {
            ok = parse_int(val, r.qid.value), have[2] = true;
        } else if (key == "t1") {
            char* end = nullptr;
            const std::string s(val);
            r.t1 = std::strtod(s.c_str(), &end);
            ok = end == s.c_str() + s.size(), have[3] = true;
        } else if (key == "t2") {
            char* end = nullptr;
            const std::string s(val);
            r.t2 = std::strtod(s.c_str(), &end);
            ok = end == s.c_str() + s.size(), have[4] = true;
        } else if (key == "route") {
            ok = parse_list<NodeId>(val, r.route, [](std::string_view s, NodeId& v) { return parse_int(s, v.value); });
            have[5] = true;
        } else if (key == "mode") {
            ok = val == "augmented" || val == "basic";
            r.augmented = val == "augmented";
            have[6] = true;
        } else if (key == "metrics") {
            ok = parse_list<qos::Metric>(val, r.metrics, [](std::string_view s, qos::Metric& v) { return parse_int(s, v); });
            have[7] = true;
        } else if (key == "auth") {
            ok = parse_hex64(val, r.auth.digest), have[8] = true;
        }
        if (!ok) return std::nullopt;
    }
    for (bool h : have) {
        if (!h) return std::nullopt;
    }
    return r;
}

}  // namespace srpsim::srp
