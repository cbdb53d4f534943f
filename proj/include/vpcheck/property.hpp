#pragma once

#include "vpcheck/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace vpcheck {

enum class PropertyKind { Type, Attribute, Behavior, Functional, Timing };
std::string_view to_string(PropertyKind k);
std::optional<PropertyKind> parse_property_kind(std::string_view s);

/// An instantiated property and its verdict for one run.
struct Property {
    std::string id; // rule code (TYPE-07, ATTR-01, ...) or spec property id (FP-3, TP-1)
    PropertyKind kind = PropertyKind::Type;
    std::string source; // rule description or spec entry rendering
    std::size_t violations = 0;

    bool passed() const { return violations == 0; }
    friend bool operator==(const Property&, const Property&) = default;
};

struct Violation {
    std::string rule; // id of the violated property
    PropertyKind kind = PropertyKind::Type;
    std::uint64_t tx_id = 0;
    std::size_t sequence_index = 1; // first faulty sequence, n_T + 1 = past the end
    std::optional<ModuleRef> module; // offender, when known
    std::string message;
    std::string observed;
    std::string expected;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Report order: (tx_id, sequence_index, rule).
bool violation_less(const Violation& a, const Violation& b);

} // namespace vpcheck
