#include "vpcheck/types.hpp"

#include "vpcheck/error.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace vpcheck {

namespace {

// "INVALID(17)" -> 17
std::optional<int> parse_invalid_code(std::string_view s) {
    constexpr std::string_view prefix = "INVALID(";
    if (!s.starts_with(prefix) || !s.ends_with(")"))
        return std::nullopt;
    s.remove_prefix(prefix.size());
    s.remove_suffix(1);
    if (s.empty())
        return std::nullopt;
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::string invalid_text(int code) {
    return "INVALID(" + std::to_string(code) + ")";
}

constexpr std::array<std::string_view, 4> kCommandNames = {"READ", "WRITE", "IGNORE", ""};
constexpr std::array<std::string_view, 7> kResponseNames = {
    "INCOMPLETE",     "OK",           "ADDRESS_ERROR",    "COMMAND_ERROR",
    "BURST_ERROR", "BYTE_ENABLE_ERROR", "GENERIC_ERROR"};
constexpr std::array<std::string_view, 4> kPhaseNames = {"BEGIN_REQ", "END_REQ", "BEGIN_RESP",
                                                         "END_RESP"};
constexpr std::array<std::string_view, 3> kSyncNames = {"ACCEPTED", "UPDATED", "COMPLETED"};

} // namespace

std::string_view to_string(ErrorCode c) {
    switch (c) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownModule: return "UnknownModule";
    case ErrorCode::UnknownEnum: return "UnknownEnum";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::TimeRegression: return "TimeRegression";
    case ErrorCode::RoleMismatch: return "RoleMismatch";
    case ErrorCode::UnmatchedReturn: return "UnmatchedReturn";
    case ErrorCode::DanglingCall: return "DanglingCall";
    case ErrorCode::NoTargetReached: return "NoTargetReached";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownModulePath: return "UnknownModulePath";
    case ErrorCode::EmptyAllowList: return "EmptyAllowList";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::IoError: return "IoError";
    }
    return "?";
}

Error::Error(ErrorCode code, std::string message, std::optional<std::uint64_t> location):
    std::runtime_error(std::string(to_string(code)) +
                       (location ? " at " + std::to_string(*location) : std::string()) + ": " +
                       message),
    code_(code), location_(location) {}

std::string_view to_string(Role r) {
    switch (r) {
    case Role::Initiator: return "INITIATOR";
    case Role::Interconnect: return "INTERCONNECT";
    case Role::Target: return "TARGET";
    }
    return "?";
}

std::string_view to_string(EventKind k) {
    return k == EventKind::Call ? "CALL" : "RETURN";
}

std::string_view to_string(Interface i) {
    switch (i) {
    case Interface::BTransport: return "B_TRANSPORT";
    case Interface::NbTransportFw: return "NB_TRANSPORT_FW";
    case Interface::NbTransportBw: return "NB_TRANSPORT_BW";
    }
    return "?";
}

std::string to_string(Command c) {
    if (c.kind == CommandKind::Invalid)
        return invalid_text(c.code);
    return std::string(kCommandNames[static_cast<std::size_t>(c.kind)]);
}

std::string to_string(ResponseStatus r) {
    if (r.kind == ResponseKind::Invalid)
        return invalid_text(r.code);
    return std::string(kResponseNames[static_cast<std::size_t>(r.kind)]);
}

std::string to_string(Phase p) {
    if (p.kind == PhaseKind::Invalid)
        return invalid_text(p.code);
    return std::string(kPhaseNames[static_cast<std::size_t>(p.kind)]);
}

std::string to_string(SyncStatus s) {
    if (s.kind == SyncKind::Invalid)
        return invalid_text(s.code);
    return std::string(kSyncNames[static_cast<std::size_t>(s.kind)]);
}

std::optional<Role> parse_role(std::string_view s) {
    if (s == "INITIATOR") return Role::Initiator;
    if (s == "INTERCONNECT") return Role::Interconnect;
    if (s == "TARGET") return Role::Target;
    return std::nullopt;
}

std::optional<EventKind> parse_event_kind(std::string_view s) {
    if (s == "CALL") return EventKind::Call;
    if (s == "RETURN") return EventKind::Return;
    return std::nullopt;
}

std::optional<Interface> parse_interface(std::string_view s) {
    if (s == "B_TRANSPORT") return Interface::BTransport;
    if (s == "NB_TRANSPORT_FW") return Interface::NbTransportFw;
    if (s == "NB_TRANSPORT_BW") return Interface::NbTransportBw;
    return std::nullopt;
}

std::optional<Command> parse_command(std::string_view s) {
    for (std::size_t i = 0; i < 3; ++i)
        if (s == kCommandNames[i])
            return Command{static_cast<CommandKind>(i), 0};
    if (auto code = parse_invalid_code(s))
        return Command{CommandKind::Invalid, *code};
    return std::nullopt;
}

std::optional<ResponseStatus> parse_response(std::string_view s) {
    for (std::size_t i = 0; i < kResponseNames.size(); ++i)
        if (s == kResponseNames[i])
            return ResponseStatus{static_cast<ResponseKind>(i), 0};
    if (auto code = parse_invalid_code(s))
        return ResponseStatus{ResponseKind::Invalid, *code};
    return std::nullopt;
}

std::optional<Phase> parse_phase(std::string_view s) {
    for (std::size_t i = 0; i < kPhaseNames.size(); ++i)
        if (s == kPhaseNames[i])
            return Phase{static_cast<PhaseKind>(i), 0};
    if (auto code = parse_invalid_code(s))
        return Phase{PhaseKind::Invalid, *code};
    return std::nullopt;
}

std::optional<SyncStatus> parse_sync(std::string_view s) {
    for (std::size_t i = 0; i < kSyncNames.size(); ++i)
        if (s == kSyncNames[i])
            return SyncStatus{static_cast<SyncKind>(i), 0};
    if (auto code = parse_invalid_code(s))
        return SyncStatus{SyncKind::Invalid, *code};
    return std::nullopt;
}

std::string to_hex(const std::vector<std::uint8_t>& bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::optional<std::vector<std::uint8_t>> from_hex(std::string_view s) {
    if (s.size() % 2 != 0)
        return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::vector<std::uint8_t> out;
    out.reserve(s.size() / 2);
    for (std::size_t i = 0; i < s.size(); i += 2) {
        int hi = nibble(s[i]);
        int lo = nibble(s[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

std::string format_address(std::uint64_t addr) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "0x%llx", static_cast<unsigned long long>(addr));
    return buf;
}

std::optional<std::uint64_t> parse_address(std::string_view s) {
    if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
        return std::nullopt;
    s.remove_prefix(2);
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || p != s.data() + s.size())
        return std::nullopt;
    return v;
}

} // namespace vpcheck
