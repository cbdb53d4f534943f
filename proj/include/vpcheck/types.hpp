#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vpcheck {

/// Simulation time in picoseconds.
struct SimTime {
    std::uint64_t ps = 0;

    constexpr SimTime() = default;
    constexpr explicit SimTime(std::uint64_t v): ps(v) {}

    friend constexpr auto operator<=>(SimTime, SimTime) = default;
    friend constexpr SimTime operator+(SimTime a, SimTime b) { return SimTime(a.ps + b.ps); }
};

enum class Role { Initiator, Interconnect, Target };

struct ModuleRef {
    std::string root_name;
    std::string instance_path;
    Role role = Role::Initiator;

    friend bool operator==(const ModuleRef&, const ModuleRef&) = default;
};

// Enumerations that may carry out-of-vocabulary codes observed in faulty
// traces. `code` is only meaningful when the kind is Invalid.

enum class CommandKind { Read, Write, Ignore, Invalid };
struct Command {
    CommandKind kind = CommandKind::Read;
    int code = 0;
    friend bool operator==(const Command&, const Command&) = default;
};

enum class ResponseKind {
    Incomplete,
    Ok,
    AddressError,
    CommandError,
    BurstError,
    ByteEnableError,
    GenericError,
    Invalid
};
struct ResponseStatus {
    ResponseKind kind = ResponseKind::Incomplete;
    int code = 0;
    friend bool operator==(const ResponseStatus&, const ResponseStatus&) = default;
};

enum class PhaseKind { BeginReq, EndReq, BeginResp, EndResp, Invalid };
struct Phase {
    PhaseKind kind = PhaseKind::BeginReq;
    int code = 0;
    friend bool operator==(const Phase&, const Phase&) = default;
};

enum class SyncKind { Accepted, Updated, Completed, Invalid };
struct SyncStatus {
    SyncKind kind = SyncKind::Accepted;
    int code = 0;
    friend bool operator==(const SyncStatus&, const SyncStatus&) = default;
};

enum class EventKind { Call, Return };
enum class Interface { BTransport, NbTransportFw, NbTransportBw };

inline bool is_nb(Interface i) {
    return i != Interface::BTransport;
}

struct TxAttributes {
    Command command;
    std::uint64_t address = 0;
    std::uint64_t data_length = 0;
    std::vector<std::uint8_t> data;
    ResponseStatus response_status;

    friend bool operator==(const TxAttributes&, const TxAttributes&) = default;
};

struct TraceEvent {
    std::uint64_t seq_no = 0;
    SimTime time;
    EventKind kind = EventKind::Call;
    Interface interface = Interface::BTransport;
    ModuleRef caller;
    ModuleRef callee;
    std::uint64_t tx_id = 0;
    std::optional<Phase> phase;
    SimTime delay;
    TxAttributes attrs;
    std::optional<SyncStatus> return_status;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

// Enum <-> text. The spellings are the ones used by the trace format.
std::string_view to_string(Role r);
std::string_view to_string(EventKind k);
std::string_view to_string(Interface i);
std::string to_string(Command c);
std::string to_string(ResponseStatus r);
std::string to_string(Phase p);
std::string to_string(SyncStatus s);

std::optional<Role> parse_role(std::string_view s);
std::optional<EventKind> parse_event_kind(std::string_view s);
std::optional<Interface> parse_interface(std::string_view s);
std::optional<Command> parse_command(std::string_view s);
std::optional<ResponseStatus> parse_response(std::string_view s);
std::optional<Phase> parse_phase(std::string_view s);
std::optional<SyncStatus> parse_sync(std::string_view s);

std::string to_hex(const std::vector<std::uint8_t>& bytes);
std::optional<std::vector<std::uint8_t>> from_hex(std::string_view s);
std::string format_address(std::uint64_t addr);
std::optional<std::uint64_t> parse_address(std::string_view s);

} // namespace vpcheck
