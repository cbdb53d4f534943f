#include "vpcheck/rule_engine.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace vpcheck {

namespace {

using S = ProtocolState;
using P = PhaseKind;

std::vector<RuleId> make_catalog() {
    auto type = [](const char* code, RuleScope scope, const char* desc) {
        return RuleId{code, RuleCategory::Type, scope, desc};
    };
    constexpr auto AT = RuleScope::AT;
    constexpr auto LT = RuleScope::LT;
    constexpr auto Any = RuleScope::Any;
    return {
        // element well-formedness
        type("TYPE-01", AT, "nb_transport phase argument is a base-protocol phase"),
        type("TYPE-02", AT, "nb_transport return value is ACCEPTED, UPDATED or COMPLETED"),
        type("TYPE-03", AT, "phase returned with UPDATED is a base-protocol phase"),
        type("TYPE-04", AT, "forward path carries only BEGIN_REQ and END_RESP"),
        type("TYPE-05", AT, "backward path carries only END_REQ and BEGIN_RESP"),
        type("TYPE-06", AT, "UPDATED on the forward path returns END_REQ or BEGIN_RESP"),
        type("TYPE-07", AT, "UPDATED on the backward path returns END_RESP"),
        // transport style and completion
        type("TYPE-08", AT, "b_transport is not used within an nb_transport transaction"),
        type("TYPE-09", LT, "no call follows the return of b_transport"),
        type("TYPE-10", AT, "no call follows a COMPLETED return"),
        type("TYPE-11", AT, "no call follows END_RESP"),
        // idle
        type("TYPE-12", AT, "an nb_transport transaction starts with BEGIN_REQ"),
        type("TYPE-13", AT, "a target does not start a transaction on the backward path"),
        // request phase
        type("TYPE-14", AT, "BEGIN_REQ is not repeated before END_REQ or BEGIN_RESP"),
        type("TYPE-15", AT, "END_RESP is not sent before BEGIN_RESP"),
        type("TYPE-16", AT, "END_REQ is not answered with UPDATED"),
        type("TYPE-17", AT, "END_REQ is sent at most once"),
        type("TYPE-18", AT, "BEGIN_REQ is not repeated while awaiting BEGIN_RESP"),
        // response phase
        type("TYPE-19", AT, "BEGIN_RESP is sent at most once"),
        type("TYPE-20", AT, "END_RESP is not answered with UPDATED"),
        // premature end
        type("TYPE-21", AT, "transaction does not end in the request phase"),
        type("TYPE-22", AT, "transaction does not end while awaiting BEGIN_RESP"),
        type("TYPE-23", AT, "transaction does not end while awaiting END_RESP"),
        type("TYPE-24", AT, "END_REQ is not sent after BEGIN_RESP"),
        type("TYPE-25", AT, "BEGIN_REQ is not repeated during the response phase"),

        {"ATTR-01", RuleCategory::Attribute, Any, "data length is a positive integer"},
        {"ATTR-02", RuleCategory::Attribute, Any,
         "response status is INCOMPLETE when the initiator issues the transaction"},
        {"ATTR-03", RuleCategory::Attribute, Any,
         "response status is set (not INCOMPLETE) when the transaction completes"},
        {"ATTR-04", RuleCategory::Attribute, Any, "response status is a valid enum value"},
        {"ATTR-05", RuleCategory::Attribute, Any, "command is a valid enum value"},
        {"ATTR-06", RuleCategory::Attribute, Any,
         "data buffer size equals data length at the initiator call"},

        {"BEH-01", RuleCategory::Behavior, Any,
         "interconnect does not modify the data (read responses on the return path exempt)"},
        {"BEH-02", RuleCategory::Behavior, Any, "interconnect does not modify the data length"},
        {"BEH-03", RuleCategory::Behavior, Any, "interconnect does not modify the command"},
        {"BEH-04", RuleCategory::Behavior, Any,
         "interconnect does not alter the response status on the return path"},
        {"BEH-05", RuleCategory::Behavior, Any,
         "interconnect forwards nb_transport phases and return values unchanged"},
    };
}

PropertyKind kind_of(RuleCategory c) {
    switch (c) {
    case RuleCategory::Type: return PropertyKind::Type;
    case RuleCategory::Attribute: return PropertyKind::Attribute;
    case RuleCategory::Behavior: return PropertyKind::Behavior;
    }
    return PropertyKind::Type;
}

bool is_target_phase(const Phase& p) {
    return p.kind == P::EndReq || p.kind == P::BeginResp;
}

// Rule broken by element `e` in state `s`, the first position where the
// FSM has no edge.
const char* rule_for_element(ProtocolState s, const SignatureElem& e) {
    if (!e.blocking) {
        if (e.phase_in.kind == P::Invalid) return "TYPE-01";
        if (e.status.kind == SyncKind::Invalid) return "TYPE-02";
        if (e.phase_out && e.phase_out->kind == P::Invalid) return "TYPE-03";
        if (e.dir == Direction::Fw && is_target_phase(e.phase_in)) return "TYPE-04";
        if (e.dir == Direction::Bw && !is_target_phase(e.phase_in)) return "TYPE-05";
        if (e.status.kind == SyncKind::Updated) {
            if (e.dir == Direction::Fw && !is_target_phase(*e.phase_out)) return "TYPE-06";
            if (e.dir == Direction::Bw && e.phase_out->kind != P::EndResp) return "TYPE-07";
        }
    }
    switch (s) {
    case S::DoneBlocking: return "TYPE-09";
    case S::DoneCompleted: return "TYPE-10";
    case S::DoneEndResp: return "TYPE-11";
    default: break;
    }
    if (e.blocking)
        return "TYPE-08";

    bool fw = e.dir == Direction::Fw;
    P ph = e.phase_in.kind;
    switch (s) {
    case S::Idle:
        return fw ? "TYPE-12" : "TYPE-13";
    case S::Request:
        if (fw) return ph == P::BeginReq ? "TYPE-14" : "TYPE-15";
        if (ph == P::EndReq && e.status.kind == SyncKind::Updated) return "TYPE-16";
        break;
    case S::AwaitResponse:
        if (fw) return ph == P::BeginReq ? "TYPE-18" : "TYPE-15";
        if (ph == P::EndReq) return "TYPE-17";
        break;
    case S::Response:
        if (fw) return ph == P::BeginReq ? "TYPE-25" : "TYPE-20";
        return ph == P::EndReq ? "TYPE-24" : "TYPE-19";
    default:
        break;
    }
    throw std::logic_error("no TYPE rule for " + e.text() + " in state " +
                           std::string(to_string(s)));
}

const char* rule_for_end(ProtocolState s) {
    switch (s) {
    case S::Request: return "TYPE-21";
    case S::AwaitResponse: return "TYPE-22";
    case S::Response: return "TYPE-23";
    default: break;
    }
    throw std::logic_error("lifetime ends in state " + std::string(to_string(s)));
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += sep;
        out += v[i];
    }
    return out;
}

bool normal_completion(const Classification& c) {
    auto id = type_id_of(c);
    if (!id)
        return false;
    const auto& elems = find_type(*id)->signature.elems;
    const auto& last = elems.back();
    return !(last.dir == Direction::Bw && last.phase_in.kind == P::EndReq);
}

Violation make(const char* rule, const TransactionLifetime& tl, const Sequence& s,
               std::string message, std::string observed, std::string expected,
               std::optional<ModuleRef> module = std::nullopt) {
    Violation v;
    v.rule = rule;
    v.kind = kind_of(find_rule(rule)->category);
    v.tx_id = tl.tx_id;
    v.sequence_index = s.index;
    v.module = std::move(module);
    v.message = std::move(message);
    v.observed = std::move(observed);
    v.expected = std::move(expected);
    return v;
}

} // namespace

std::string_view to_string(RuleCategory c) {
    switch (c) {
    case RuleCategory::Type: return "TYPE";
    case RuleCategory::Attribute: return "ATTRIBUTE";
    case RuleCategory::Behavior: return "BEHAVIOR";
    }
    return "?";
}

const std::vector<RuleId>& rule_catalog() {
    static const std::vector<RuleId> catalog = make_catalog();
    return catalog;
}

const RuleId* find_rule(std::string_view code) {
    for (const auto& r : rule_catalog())
        if (r.code == code)
            return &r;
    return nullptr;
}

std::optional<Violation> check_type_rules(const TransactionLifetime& tl,
                                          const Classification& c) {
    const auto* tv = std::get_if<TypeViolation>(&c);
    if (!tv)
        return std::nullopt;

    auto sig = signature_of(tl);
    auto w = walk(base_protocol_fsm(), sig.elems);
    // Reference prefixes and FSM walks coincide.
    if (w.accepted + 1 != tv->first_faulty_index)
        throw std::logic_error("signature localization disagrees with the protocol FSM");

    Violation v;
    v.kind = PropertyKind::Type;
    v.tx_id = tl.tx_id;
    v.sequence_index = tv->first_faulty_sequence;
    v.expected = join(tv->expected_next, " | ");
    if (w.accepted == sig.elems.size()) {
        v.rule = rule_for_end(w.state);
        v.message = "transaction ends in state " + std::string(to_string(w.state));
        v.observed = "end of lifetime";
    } else {
        const auto& e = sig.elems[w.accepted];
        v.rule = rule_for_element(w.state, e);
        v.message = "unexpected " + e.text() + " in state " + std::string(to_string(w.state));
        v.observed = e.text();
        auto level = initiator_level(tl);
        v.module = level[w.accepted]->from;
    }
    v.message += " (signature " + sig.text() + ")";
    return v;
}

std::vector<Violation> check_attribute_rules(const TransactionLifetime& tl) {
    return check_attribute_rules(tl, classify(tl));
}

std::vector<Violation> check_attribute_rules(const TransactionLifetime& tl,
                                             const Classification& c) {
    std::vector<Violation> out;
    const auto& first = tl.sequences.front();

    for (const auto& s : tl.sequences) {
        if (s.attrs_at_call.data_length == 0 || s.attrs_at_return.data_length == 0)
            out.push_back(make("ATTR-01", tl, s, "data length is zero", "0", "> 0", s.from));
    }

    if (first.attrs_at_call.response_status.kind != ResponseKind::Incomplete)
        out.push_back(make("ATTR-02", tl, first, "initiator issued a preset response status",
                           to_string(first.attrs_at_call.response_status), "INCOMPLETE",
                           first.from));

    if (normal_completion(c)) {
        const auto& last = final_sequence(tl);
        if (last.attrs_at_return.response_status.kind == ResponseKind::Incomplete)
            out.push_back(make("ATTR-03", tl, last, "transaction completed without a response",
                               "INCOMPLETE", "OK or an error status", last.to));
    }

    for (const auto& s : tl.sequences) {
        for (const auto* a : {&s.attrs_at_call, &s.attrs_at_return}) {
            if (a->response_status.kind == ResponseKind::Invalid) {
                out.push_back(make("ATTR-04", tl, s, "response status out of range",
                                   to_string(a->response_status), "a tlm_response_status value",
                                   a == &s.attrs_at_call ? s.from : s.to));
                break;
            }
        }
        for (const auto* a : {&s.attrs_at_call, &s.attrs_at_return}) {
            if (a->command.kind == CommandKind::Invalid) {
                out.push_back(make("ATTR-05", tl, s, "command out of range",
                                   to_string(a->command), "READ, WRITE or IGNORE",
                                   a == &s.attrs_at_call ? s.from : s.to));
                break;
            }
        }
    }

    const auto& a = first.attrs_at_call;
    if (a.data.size() != a.data_length)
        out.push_back(make("ATTR-06", tl, first, "data buffer does not match data length",
                           std::to_string(a.data.size()) + " bytes",
                           std::to_string(a.data_length) + " bytes", first.from));

    std::stable_sort(out.begin(), out.end(), violation_less);
    return out;
}

std::vector<Violation> check_behavior_rules(const TransactionLifetime& tl) {
    std::vector<Violation> out;
    for (const auto& outer : tl.sequences) {
        if (outer.to.role != Role::Interconnect)
            continue;
        const auto& ic = outer.to;
        for (const Sequence* inner : nested_children(tl, outer)) {
            if (inner->from.instance_path != ic.instance_path)
                continue;
            const auto& oc = outer.attrs_at_call;
            const auto& icall = inner->attrs_at_call;
            const auto& oret = outer.attrs_at_return;
            const auto& iret = inner->attrs_at_return;
            auto hop = ic.instance_path + " -> " + inner->to.instance_path;

            if (oc.data != icall.data)
                out.push_back(make("BEH-01", tl, *inner, "data modified on " + hop,
                                   to_hex(icall.data), to_hex(oc.data), ic));
            else if (oc.command.kind != CommandKind::Read && oret.data != iret.data)
                out.push_back(make("BEH-01", tl, outer, "data modified on return through " +
                                   ic.instance_path, to_hex(oret.data), to_hex(iret.data), ic));

            if (oc.data_length != icall.data_length)
                out.push_back(make("BEH-02", tl, *inner, "data length modified on " + hop,
                                   std::to_string(icall.data_length),
                                   std::to_string(oc.data_length), ic));
            else if (oret.data_length != iret.data_length)
                out.push_back(make("BEH-02", tl, outer,
                                   "data length modified on return through " + ic.instance_path,
                                   std::to_string(oret.data_length),
                                   std::to_string(iret.data_length), ic));

            if (oc.command != icall.command)
                out.push_back(make("BEH-03", tl, *inner, "command modified on " + hop,
                                   to_string(icall.command), to_string(oc.command), ic));
            else if (oret.command != iret.command)
                out.push_back(make("BEH-03", tl, outer,
                                   "command modified on return through " + ic.instance_path,
                                   to_string(oret.command), to_string(iret.command), ic));

            if (oret.response_status != iret.response_status)
                out.push_back(make("BEH-04", tl, outer,
                                   "response status altered on return through " +
                                       ic.instance_path,
                                   to_string(oret.response_status),
                                   to_string(iret.response_status), ic));

            if (is_nb(outer.interface) || is_nb(inner->interface)) {
                auto render = [](const Sequence& s) {
                    std::string r(to_string(s.interface));
                    r += " " + (s.phase_at_call ? to_string(*s.phase_at_call) : "-");
                    r += " -> " + (s.status ? to_string(*s.status) : "-");
                    r += " " + (s.phase_at_return ? to_string(*s.phase_at_return) : "-");
                    return r;
                };
                if (outer.interface != inner->interface ||
                    outer.phase_at_call != inner->phase_at_call)
                    out.push_back(make("BEH-05", tl, *inner, "phase not forwarded on " + hop,
                                       render(*inner), render(outer), ic));
                else if (outer.status != inner->status ||
                         outer.phase_at_return != inner->phase_at_return)
                    out.push_back(make("BEH-05", tl, outer,
                                       "return value not forwarded through " + ic.instance_path,
                                       render(outer), render(*inner), ic));
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), violation_less);
    return out;
}

ProtocolCheck protocol_properties(std::span<const TransactionLifetime> lifetimes,
                                  std::span<const Classification> classifications,
                                  std::span<const Violation> violations) {
    (void)classifications;
    bool any_lt = false;
    bool any_at = false;
    for (const auto& tl : lifetimes) {
        if (tl.sequences.empty())
            continue;
        if (is_nb(tl.sequences.front().interface))
            any_at = true;
        else
            any_lt = true;
    }

    std::map<std::string, std::size_t> counts;
    for (const auto& v : violations)
        ++counts[v.rule];

    ProtocolCheck out;
    for (const auto& r : rule_catalog()) {
        bool applicable = r.scope == RuleScope::Any || (r.scope == RuleScope::LT && any_lt) ||
                          (r.scope == RuleScope::AT && any_at);
        // A violation always instantiates its rule, even outside its scope.
        if (!applicable && !counts.count(r.code))
            continue;
        Property p;
        p.id = r.code;
        p.kind = kind_of(r.category);
        p.source = r.description;
        p.violations = counts.count(r.code) ? counts[r.code] : 0;
        out.properties.push_back(std::move(p));
    }
    out.violations.assign(violations.begin(), violations.end());
    std::stable_sort(out.violations.begin(), out.violations.end(), violation_less);
    return out;
}

ProtocolCheck check_protocol(std::span<const TransactionLifetime> lifetimes,
                             std::span<const Classification> classifications) {
    std::vector<Violation> all;
    for (std::size_t i = 0; i < lifetimes.size(); ++i) {
        const auto& tl = lifetimes[i];
        if (auto v = check_type_rules(tl, classifications[i]))
            all.push_back(std::move(*v));
        auto attr = check_attribute_rules(tl, classifications[i]);
        all.insert(all.end(), attr.begin(), attr.end());
        auto beh = check_behavior_rules(tl);
        all.insert(all.end(), beh.begin(), beh.end());
    }
    return protocol_properties(lifetimes, classifications, all);
}

} // namespace vpcheck
