#pragma once

#include "vpcheck/property.hpp"
#include "vpcheck/trace_ingest.hpp"
#include "vpcheck/trace_model.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vpcheck {

struct AddressRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0; // inclusive

    bool contains(std::uint64_t a) const { return lo <= a && a <= hi; }
    friend bool operator==(const AddressRange&, const AddressRange&) = default;
};

struct AllowedAccess {
    std::string tm;
    AddressRange range;
    std::set<int> tt;

    friend bool operator==(const AllowedAccess&, const AllowedAccess&) = default;
};

/// Targets, address ranges and transaction types an initiator may use.
struct FunctionalSpecEntry {
    std::string im;
    std::vector<AllowedAccess> allowed;

    friend bool operator==(const FunctionalSpecEntry&, const FunctionalSpecEntry&) = default;
};

/// Delay bound for one (initiator, target, range, type) combination.
struct TimingSpecEntry {
    std::string im;
    std::string tm;
    AddressRange range;
    int tt = 0;
    SimTime td_max;

    friend bool operator==(const TimingSpecEntry&, const TimingSpecEntry&) = default;
};

struct VpSpec {
    std::vector<FunctionalSpecEntry> functional;
    std::vector<TimingSpecEntry> timing;

    friend bool operator==(const VpSpec&, const VpSpec&) = default;
};

/// Parses the spec file (JSON object with "functional" and "timing"
/// arrays). When `header` is given, module paths must resolve against it.
/// Throws Error{SchemaError | UnknownModulePath | EmptyAllowList | InvalidRange}.
VpSpec parse_spec(std::string_view text, const TraceHeader* header = nullptr);
VpSpec read_spec_file(const std::filesystem::path& path, const TraceHeader* header = nullptr);
std::string serialize_spec(const VpSpec& spec);

/// One FUNCTIONAL property per allowed tuple (FP-1, FP-2, ... in file order).
std::vector<Property> functional_properties(const VpSpec& spec);
/// One TIMING property per timing entry (TP-1, ...).
std::vector<Property> timing_properties(const VpSpec& spec);

enum class TimingMode { UpperBound, Exact };

struct SpecCheck {
    std::vector<Property> properties;
    std::vector<Violation> violations;
    std::vector<std::string> diagnostics;
};

/// A path conforms iff some allowed tuple of its initiator matches target,
/// address range and type.
SpecCheck validate_functional(const Sap& sap, const VpSpec& spec);

/// Paths matching a timing entry conform iff td <= td_max (or td == td_max
/// in exact mode). Unmatched paths are not timing-checked.
SpecCheck validate_timing(const Sap& sap, const VpSpec& spec,
                          TimingMode mode = TimingMode::UpperBound);

std::string nomatch_property_id(std::string_view im);

} // namespace vpcheck
