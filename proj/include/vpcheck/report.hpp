#pragma once

#include "vpcheck/property.hpp"
#include "vpcheck/spec_properties.hpp"
#include "vpcheck/trace_ingest.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vpcheck {

inline constexpr std::string_view kReportSchema = "vpcheck-report-1";

struct CategoryTotals {
    PropertyKind kind = PropertyKind::Type;
    std::size_t total = 0;
    std::size_t pass = 0;
    std::size_t fail = 0;

    friend bool operator==(const CategoryTotals&, const CategoryTotals&) = default;
};

struct PhaseTiming {
    std::string phase; // "ingest", "protocol", "spec"
    double ms = 0;

    friend bool operator==(const PhaseTiming&, const PhaseTiming&) = default;
};

struct Report {
    std::string design;
    std::size_t n_trans = 0;
    std::size_t n_types = 0;      // distinct classified types
    std::string timing_model;     // "LT", "AT", "LT/AT" or "-"
    std::size_t properties_total = 0;
    std::size_t pass = 0;
    std::size_t fail = 0;
    std::size_t faulty_transactions = 0;
    std::vector<CategoryTotals> categories; // TYPE, ATTRIBUTE, BEHAVIOR, FUNCTIONAL, TIMING
    std::vector<Property> properties;
    std::vector<Violation> violations; // sorted by violation_less
    std::vector<std::string> diagnostics;
    bool phase2_ran = false;
    bool phase2_gated = false; // skipped because phase 1 found violations
    std::vector<PhaseTiming> timings;

    friend bool operator==(const Report&, const Report&) = default;
};

struct CheckOptions {
    bool force_phase2 = false;
    TimingMode timing_mode = TimingMode::UpperBound;
};

/// Protocol phase, then (when clean or forced) the spec phase. Input errors
/// propagate as vpcheck::Error.
Report run_check(const Trace& trace, const VpSpec& spec, const CheckOptions& opts = {});
Report run_check_files(const std::filesystem::path& trace, const std::filesystem::path& spec,
                       const CheckOptions& opts = {});

/// 0 = clean, 1 = violations.
int exit_code(const Report& r);

struct EmitOptions {
    bool color = false;
    bool timings = false; // wall-clock numbers make json non-reproducible
};

/// format: "text" or "json". Throws Error{UnknownFormat}.
std::string emit_report(const Report& r, std::string_view format, const EmitOptions& opts = {});

/// Parses the json format back. Throws Error{SchemaError}.
Report report_from_json(std::string_view text);

} // namespace vpcheck
