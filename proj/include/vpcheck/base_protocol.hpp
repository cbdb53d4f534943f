#pragma once

#include "vpcheck/trace_model.hpp"
#include "vpcheck/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace vpcheck {

enum class Direction { Fw, Bw };

/// One element of a type signature: either a blocking transport call ("bt")
/// or a non-blocking call rendered as dir:phase/status[>phase_out].
struct SignatureElem {
    bool blocking = false;
    Direction dir = Direction::Fw;
    Phase phase_in;
    SyncStatus status;
    std::optional<Phase> phase_out; // present iff status is UPDATED

    static SignatureElem bt() {
        SignatureElem e;
        e.blocking = true;
        return e;
    }
    static SignatureElem nb(Direction d, PhaseKind in, SyncKind st,
                            std::optional<PhaseKind> out = std::nullopt);

    std::string text() const;

    friend bool operator==(const SignatureElem&, const SignatureElem&) = default;
};

/// Canonical signature text: ELEM (";" ELEM)*.
struct TypeSignature {
    std::vector<SignatureElem> elems;

    std::string text() const;
    friend bool operator==(const TypeSignature&, const TypeSignature&) = default;
};

/// Parses canonical signature text. Returns nullopt on grammar errors.
std::optional<TypeSignature> parse_signature(std::string_view text);

enum class TimingModel { LT, AT };
std::string_view to_string(TimingModel m);

struct TransactionType {
    int id = 0; // 1..13
    TypeSignature signature;
    TimingModel timing_model = TimingModel::LT;
};

enum class ProtocolState { Idle, Request, AwaitResponse, Response, DoneBlocking, DoneCompleted, DoneEndResp };
std::string_view to_string(ProtocolState s);

inline bool is_accepting(ProtocolState s) {
    return s == ProtocolState::DoneBlocking || s == ProtocolState::DoneCompleted ||
           s == ProtocolState::DoneEndResp;
}

struct ProtocolEdge {
    ProtocolState from;
    SignatureElem elem;
    ProtocolState to;
};

/// Base-protocol state machine over signature elements.
struct ProtocolFsm {
    std::vector<ProtocolState> states;
    std::vector<ProtocolEdge> edges; // deterministic on (from, elem)
    ProtocolState initial = ProtocolState::Idle;

    std::optional<ProtocolState> step(ProtocolState s, const SignatureElem& e) const;
    std::vector<SignatureElem> outgoing(ProtocolState s) const;
};

const ProtocolFsm& base_protocol_fsm();

/// Result of walking a signature through the FSM: number of elements
/// consumed before the first missing edge (or all of them) and the state
/// reached at that point.
struct FsmWalk {
    std::size_t accepted = 0;
    ProtocolState state = ProtocolState::Idle;
};
FsmWalk walk(const ProtocolFsm& fsm, std::span<const SignatureElem> elems);

/// All complete FSM paths rendered as transaction types, bt first, then
/// depth-first in edge-table order. Ids are 1-based and stable.
std::vector<TransactionType> enumerate_base_protocol_types();

/// Process-wide immutable reference set.
const std::vector<TransactionType>& reference_types();
const TransactionType* find_type(int id);

/// One element per initiator-level sequence. END_RESP returned ACCEPTED is
/// canonicalized to COMPLETED. Throws Error{MissingField}.
TypeSignature signature_of(const TransactionLifetime& tl);

struct ClassifiedOk {
    int type_id = 0;
};

struct TypeViolation {
    std::size_t first_faulty_index = 0;    // 1-based over signature elements
    std::size_t first_faulty_sequence = 0; // 1-based over lifetime sequences, n_T + 1 = end
    std::vector<std::string> expected_next; // element texts that extend the valid prefix
};

using Classification = std::variant<ClassifiedOk, TypeViolation>;

/// Matches a signature against the reference set. On mismatch, localizes the
/// first element that leaves every reference prefix.
Classification classify_signature(const TypeSignature& sig);

Classification classify(const TransactionLifetime& tl);

inline std::optional<int> type_id_of(const Classification& c) {
    if (auto* ok = std::get_if<ClassifiedOk>(&c))
        return ok->type_id;
    return std::nullopt;
}

} // namespace vpcheck
