#pragma once

#include "vpcheck/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vpcheck {

/// One matched call/return pair of a transport interface.
struct Sequence {
    std::size_t index = 0; // 1-based position in the lifetime
    Interface interface = Interface::BTransport;
    ModuleRef from;
    ModuleRef to;
    std::optional<Phase> phase_at_call;
    std::optional<Phase> phase_at_return;
    std::optional<SyncStatus> status;
    TxAttributes attrs_at_call;
    TxAttributes attrs_at_return;
    SimTime t_call;
    SimTime t_return;
    SimTime delay_at_call;
    SimTime delay_at_return;

    // Provenance in the source stream; kept so a lifetime can be written
    // back out at its original positions.
    std::uint64_t call_seq_no = 0;
    std::uint64_t return_seq_no = 0;
    std::size_t depth = 0; // call nesting depth within the lifetime, 0 = outermost

    friend bool operator==(const Sequence&, const Sequence&) = default;
};

struct TransactionLifetime {
    std::uint64_t tx_id = 0;
    std::vector<Sequence> sequences; // sorted by (t_call, call_seq_no)

    std::size_t n_t() const { return sequences.size(); }
    /// The first INITIATOR-role endpoint in sequence order (normally the
    /// caller of the first sequence).
    const ModuleRef& initiator() const;

    friend bool operator==(const TransactionLifetime&, const TransactionLifetime&) = default;
};

/// Sequences that touch the initiator: forward calls it makes and backward
/// calls it receives. These carry the base-protocol phase handshake.
std::vector<const Sequence*> initiator_level(const TransactionLifetime& tl);

/// The sequence whose return is last in the stream.
const Sequence& final_sequence(const TransactionLifetime& tl);

/// Children directly nested inside `parent` (same tx, depth + 1, call and
/// return bracketed by the parent's).
std::vector<const Sequence*> nested_children(const TransactionLifetime& tl, const Sequence& parent);

/// Pairs calls and returns into lifetimes, one per tx_id, ordered by tx_id.
/// Throws Error{UnmatchedReturn | DanglingCall}.
std::vector<TransactionLifetime> build_lifetimes(std::span<const TraceEvent> events);

/// Inverse of build_lifetimes: the call/return events of a lifetime, in
/// seq_no order.
std::vector<TraceEvent> lifetime_events(const TransactionLifetime& tl);

/// Merges the events of several lifetimes back into one stream ordered by
/// seq_no.
std::vector<TraceEvent> lifetimes_to_events(std::span<const TransactionLifetime> lifetimes);

struct AccessPath {
    ModuleRef im;
    ModuleRef tm;
    std::uint64_t tid = 0;
    std::optional<int> tt; // transaction type id, nullopt = UNKNOWN
    std::uint64_t tadr = 0;
    Command cmd;
    SimTime td;
    std::size_t final_sequence = 1; // index of the sequence carrying the final return

    friend bool operator==(const AccessPath&, const AccessPath&) = default;
};

struct Sap {
    std::vector<AccessPath> paths;
    std::size_t n_seq() const { return paths.size(); }
};

struct SapDiagnostic {
    std::uint64_t tx_id = 0;
    std::string message;
};

struct SapResult {
    Sap sap;
    std::vector<SapDiagnostic> diagnostics;
};

/// Total delay: elapsed time from the first call to the final return plus
/// the timing annotation carried back by that return.
SimTime total_delay(const TransactionLifetime& tl);

/// Throws Error{NoTargetReached}.
AccessPath to_access_path(const TransactionLifetime& tl, std::optional<int> tt);

/// `types[i]` is the classification of `lifetimes[i]`.
SapResult build_sap(std::span<const TransactionLifetime> lifetimes,
                    std::span<const std::optional<int>> types);

} // namespace vpcheck
