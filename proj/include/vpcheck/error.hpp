#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vpcheck {

enum class ErrorCode {
    // trace_ingest
    SyntaxError,
    UnknownModule,
    UnknownEnum,
    VersionMismatch,
    TimeRegression,
    RoleMismatch,
    // trace_model
    UnmatchedReturn,
    DanglingCall,
    NoTargetReached,
    // base_protocol
    MissingField,
    // spec_properties
    SchemaError,
    UnknownModulePath,
    EmptyAllowList,
    InvalidRange,
    // synth_vp
    ConfigError,
    // cli_report
    UnknownFormat,
    IoError,
};

std::string_view to_string(ErrorCode c);

/// Input error raised by the checker pipeline. `location` is a line number
/// for parse errors and an event seq_no for stream errors.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message,
          std::optional<std::uint64_t> location = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::uint64_t> location() const noexcept { return location_; }

private:
    ErrorCode code_;
    std::optional<std::uint64_t> location_;
};

} // namespace vpcheck
