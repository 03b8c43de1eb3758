#pragma once

#include "srpsim/qos/metric.hpp"
#include "srpsim/types.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace srpsim::identity {

struct Authenticator {
    std::uint64_t digest = 0;

    constexpr auto operator<=>(const Authenticator&) const = default;
};

// Length-prefixed field encoding: one tag byte, a little-endian u32 payload
// length, then the payload. Distinct field lists never encode identically.
class FieldWriter {
public:
    FieldWriter& node(NodeId id);
    FieldWriter& query(QueryId qid);
    FieldWriter& nodes(std::span<const NodeId> ids);
    FieldWriter& metrics(std::span<const qos::Metric> values);

    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

private:
    void header(std::uint8_t tag, std::uint32_t length);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);

    std::vector<std::uint8_t> bytes_;
};

// Declared pairwise keys K(u, v) = K(v, u). Immutable after loading.
class KeyRing {
public:
    void declare(NodeId u, NodeId v);
    bool holds(NodeId caller, NodeId peer) const;
    std::set<NodeId> peers(NodeId node) const;
    const std::set<std::pair<NodeId, NodeId>>& pairs() const noexcept { return pairs_; }

    // f_K over the encoded fields with K(caller, peer). Throws
    // KeyAccessViolation if the caller does not hold that key.
    Authenticator f_k(NodeId caller, NodeId peer, std::span<const std::uint8_t> fields) const;

private:
    std::uint64_t secret(NodeId u, NodeId v) const;

    std::set<std::pair<NodeId, NodeId>> pairs_;
};

// Records which node computed each authenticator value during one run.
class AuthLog {
public:
    void record(Authenticator value, NodeId caller);
    // Nodes that computed `value`; empty if nobody did (a guess or a forgery).
    std::set<NodeId> issuers(Authenticator value) const;

private:
    std::map<Authenticator, std::set<NodeId>> issued_;
};

// Per-run signing handle: KeyRing access check plus issuance logging.
class Signer {
public:
    Signer(const KeyRing& keys, AuthLog* log) : keys_(&keys), log_(log) {}

    const KeyRing& keys() const noexcept { return *keys_; }
    // Generates an authenticator; logged as issued by `caller`.
    Authenticator sign(NodeId caller, NodeId peer, std::span<const std::uint8_t> fields) const;
    // Recomputes and compares without logging. Throws KeyAccessViolation.
    bool verify(NodeId caller, NodeId peer, std::span<const std::uint8_t> fields, Authenticator claimed) const;

private:
    const KeyRing* keys_;
    AuthLog* log_;
};

}  // namespace srpsim::identity
