#include "srpsim/identity/keyring.hpp"

#include "srpsim/errors.hpp"
#include "srpsim/hash.hpp"

namespace srpsim::identity {

namespace {

enum : std::uint8_t { kTagNode = 1, kTagQuery = 2, kTagNodes = 3, kTagMetrics = 4 };

constexpr std::uint64_t kKeySalt = 0x7f4a7c159e3779b9ULL;

std::pair<NodeId, NodeId> ordered(NodeId u, NodeId v) { return u < v ? std::pair{u, v} : std::pair{v, u}; }

}  // namespace

void FieldWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void FieldWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void FieldWriter::header(std::uint8_t tag, std::uint32_t length) {
    bytes_.push_back(tag);
    u32(length);
}

FieldWriter& FieldWriter::node(NodeId id) {
    header(kTagNode, 4);
    u32(id.value);
    return *this;
}

FieldWriter& FieldWriter::query(QueryId qid) {
    header(kTagQuery, 8);
    u64(qid.value);
    return *this;
}

FieldWriter& FieldWriter::nodes(std::span<const NodeId> ids) {
    header(kTagNodes, static_cast<std::uint32_t>(4 * ids.size()));
    for (NodeId id : ids) u32(id.value);
    return *this;
}

FieldWriter& FieldWriter::metrics(std::span<const qos::Metric> values) {
    header(kTagMetrics, static_cast<std::uint32_t>(8 * values.size()));
    for (qos::Metric m : values) u64(static_cast<std::uint64_t>(m));
    return *this;
}

void KeyRing::declare(NodeId u, NodeId v) {
    if (u == v) throw InvalidArgument("a key needs two distinct nodes");
    pairs_.insert(ordered(u, v));
}

bool KeyRing::holds(NodeId caller, NodeId peer) const { return pairs_.contains(ordered(caller, peer)); }

std::set<NodeId> KeyRing::peers(NodeId node) const {
    std::set<NodeId> out;
    for (const auto& [a, b] : pairs_) {
        if (a == node) out.insert(b);
        if (b == node) out.insert(a);
    }
    return out;
}

std::uint64_t KeyRing::secret(NodeId u, NodeId v) const {
    const auto [a, b] = ordered(u, v);
    return splitmix64(kKeySalt ^ ((static_cast<std::uint64_t>(a.value) << 32) | b.value));
}

Authenticator KeyRing::f_k(NodeId caller, NodeId peer, std::span<const std::uint8_t> fields) const {
    if (!holds(caller, peer)) {
        throw KeyAccessViolation("node " + to_string(caller) + " does not hold K(" + to_string(caller) + "," +
                                 to_string(peer) + ")");
    }
    return Authenticator{keyed_mix(secret(caller, peer), fields)};
}

void AuthLog::record(Authenticator value, NodeId caller) { issued_[value].insert(caller); }

std::set<NodeId> AuthLog::issuers(Authenticator value) const {
    auto it = issued_.find(value);
    return it == issued_.end() ? std::set<NodeId>{} : it->second;
}

Authenticator Signer::sign(NodeId caller, NodeId peer, std::span<const std::uint8_t> fields) const {
    Authenticator a = keys_->f_k(caller, peer, fields);
    if (log_ != nullptr) log_->record(a, caller);
    return a;
}

bool Signer::verify(NodeId caller, NodeId peer, std::span<const std::uint8_t> fields, Authenticator claimed) const {
    return keys_->f_k(caller, peer, fields) == claimed;
}

}  // namespace srpsim::identity
