#include "srpsim/srp/messages.hpp"

#include "srpsim/hash.hpp"

namespace srpsim::srp {

std::vector<std::uint8_t> query_fields(NodeId src, NodeId dst, QueryId qid) {
    identity::FieldWriter w;
    w.node(src).node(dst).query(qid);
    return w.bytes();
}

std::vector<std::uint8_t> reply_fields(NodeId src, NodeId dst, QueryId qid, const std::vector<NodeId>& route,
                                       const std::vector<qos::Metric>* metric_list) {
    identity::FieldWriter w;
    w.node(src).node(dst).query(qid).nodes(route);
    if (metric_list != nullptr) w.metrics(*metric_list);
    return w.bytes();
}

std::uint64_t packet_digest(const Packet& packet) {
    identity::FieldWriter w;
    std::uint64_t auth = 0;
    std::uint8_t type = 0;
    if (const auto* q = std::get_if<Rreq>(&packet)) {
        type = 1;
        w.node(q->src).node(q->dst).query(q->qid).nodes(q->node_list).metrics(q->metric_list);
        auth = q->auth.digest;
    } else {
        const auto& r = std::get<Rrep>(packet);
        type = 2;
        w.node(r.src).node(r.dst).query(r.qid).nodes(r.route).metrics(r.metric_list);
        auth = r.auth.digest;
    }
    Fnv1a h;
    h.update(std::span<const std::uint8_t>(&type, 1));
    h.update(w.bytes());
    const std::string a = hex64(auth);
    h.update(a);
    return h.value();
}

std::string join_nodes(const std::vector<NodeId>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out += ',';
        out += to_string(ids[i]);
    }
    return out.empty() ? "-" : out;
}

std::string join_metrics(const std::vector<qos::Metric>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    return out.empty() ? "-" : out;
}

std::string describe(const Packet& packet) {
    if (const auto* q = std::get_if<Rreq>(&packet)) {
        return "RREQ S=" + to_string(q->src) + " T=" + to_string(q->dst) + " Q=" + std::to_string(q->qid.value) +
               " nl=" + join_nodes(q->node_list) + " ml=" + join_metrics(q->metric_list);
    }
    const auto& r = std::get<Rrep>(packet);
    return "RREP S=" + to_string(r.src) + " T=" + to_string(r.dst) + " Q=" + std::to_string(r.qid.value) +
           " route=" + join_nodes(r.route) + " ml=" + join_metrics(r.metric_list);
}

bool is_rreq(const Packet& p) noexcept { return std::holds_alternative<Rreq>(p); }

}  // namespace srpsim::srp
