#pragma once

#include "vpcheck/base_protocol.hpp"
#include "vpcheck/property.hpp"
#include "vpcheck/trace_model.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vpcheck {

enum class RuleCategory { Type, Attribute, Behavior };
std::string_view to_string(RuleCategory c);

/// Which lifetimes a rule can apply to. Rules are instantiated as
/// properties only when the trace contains such a lifetime.
enum class RuleScope { Any, LT, AT };

struct RuleId {
    std::string code;
    RuleCategory category;
    RuleScope scope;
    std::string description;
};

/// 25 TYPE rules followed by the 6 ATTRIBUTE and 5 BEHAVIOR rules.
const std::vector<RuleId>& rule_catalog();
const RuleId* find_rule(std::string_view code);

/// Maps an unclassified lifetime to the TYPE rule its first faulty element
/// breaks. Returns nullopt for lifetimes that classify.
std::optional<Violation> check_type_rules(const TransactionLifetime& tl,
                                          const Classification& c);

std::vector<Violation> check_attribute_rules(const TransactionLifetime& tl,
                                             const Classification& c);
std::vector<Violation> check_attribute_rules(const TransactionLifetime& tl);

std::vector<Violation> check_behavior_rules(const TransactionLifetime& tl);

struct ProtocolCheck {
    std::vector<Property> properties; // catalog order
    std::vector<Violation> violations; // report order
};

/// Instantiates one property per applicable catalog rule and folds the
/// per-lifetime violations into verdicts.
ProtocolCheck protocol_properties(std::span<const TransactionLifetime> lifetimes,
                                  std::span<const Classification> classifications,
                                  std::span<const Violation> violations);

/// Convenience: classify and run every per-lifetime check.
ProtocolCheck check_protocol(std::span<const TransactionLifetime> lifetimes,
                             std::span<const Classification> classifications);

} // namespace vpcheck
