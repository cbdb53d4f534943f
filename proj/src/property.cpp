#include "vpcheck/property.hpp"

#include <tuple>

namespace vpcheck {

std::string_view to_string(PropertyKind k) {
    switch (k) {
    case PropertyKind::Type: return "TYPE";
    case PropertyKind::Attribute: return "ATTRIBUTE";
    case PropertyKind::Behavior: return "BEHAVIOR";
    case PropertyKind::Functional: return "FUNCTIONAL";
    case PropertyKind::Timing: return "TIMING";
    }
    return "?";
}

std::optional<PropertyKind> parse_property_kind(std::string_view s) {
    for (auto k : {PropertyKind::Type, PropertyKind::Attribute, PropertyKind::Behavior,
                   PropertyKind::Functional, PropertyKind::Timing})
        if (to_string(k) == s)
            return k;
    return std::nullopt;
}

bool violation_less(const Violation& a, const Violation& b) {
    return std::tie(a.tx_id, a.sequence_index, a.rule, a.message, a.observed) <
           std::tie(b.tx_id, b.sequence_index, b.rule, b.message, b.observed);
}

} // namespace vpcheck
