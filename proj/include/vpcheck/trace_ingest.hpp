#pragma once

#include "vpcheck/types.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vpcheck {

inline constexpr std::string_view kTraceFormat = "vptrace-1";

struct TraceHeader {
    std::string format_version{kTraceFormat};
    std::string design_name;
    std::vector<ModuleRef> modules; // module table, instance paths unique

    const ModuleRef* find(std::string_view instance_path) const;

    friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct Trace {
    TraceHeader header;
    std::vector<TraceEvent> events; // seq_no = 1-based file order

    friend bool operator==(const Trace&, const Trace&) = default;
};

/// Parses vptrace-1 text: a header object on the first non-blank line, then
/// one event object per line. Throws Error{SyntaxError | UnknownModule |
/// UnknownEnum | VersionMismatch} with the 1-based line number.
Trace parse_trace(std::string_view text);

/// Reads a trace file; names ending in ".gz" are decompressed.
Trace read_trace_file(const std::filesystem::path& path);

std::string serialize_trace(const Trace& trace);
std::string serialize_header(const TraceHeader& header);
std::string serialize_event(const TraceEvent& event);

void write_trace_file(const std::filesystem::path& path, const Trace& trace);

/// Checks time monotonicity, caller/callee roles per interface direction and
/// call/return pairing. Throws Error{TimeRegression | RoleMismatch |
/// UnmatchedReturn | DanglingCall} with the offending seq_no.
void validate_stream(std::span<const TraceEvent> events);

/// Reads a whole file as bytes (gzip aware, see read_trace_file).
std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

} // namespace vpcheck
