#pragma once

#include "support.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vpt {

/// A crafted trigger trace for one catalog rule and a sibling that must not
/// fire anything.
struct RuleCase {
    std::string rule;
    std::function<void(Builder&)> trigger;
    std::function<void(Builder&)> clean;
    std::size_t sequence_index; // expected first faulty sequence
};

inline RuleCase sig_case(std::string rule, std::string bad, std::string good,
                         std::size_t index) {
    return {std::move(rule), [bad](Builder& b) { b.signature(1, bad); },
            [good](Builder& b) { b.signature(1, good); }, index};
}

// b_transport via the bus with a tweak applied to event `which` (0..3:
// outer call, inner call, inner return, outer return).
inline std::function<void(Builder&)> routed_bt(CommandKind cmd,
                                               std::function<void(TraceEvent&)> tweak,
                                               int which) {
    return [=](Builder& b) {
        b.bt(1, 100, 150, 0, true, cmd);
        if (cmd == CommandKind::Write)
            for (auto& ev : b.events)
                ev.attrs.data = {1, 2, 3, 4};
        if (tweak)
            tweak(b.events[which]);
    };
}

// Single b_transport cpu -> mem with tweaks on the call and return events.
inline std::function<void(Builder&)> direct_bt(std::function<void(TraceEvent&)> on_call,
                                               std::function<void(TraceEvent&)> on_ret) {
    return [=](Builder& b) {
        b.bt(1, 100, 150, 0);
        if (on_call)
            on_call(b.events[0]);
        if (on_ret)
            on_ret(b.events[1]);
    };
}

inline std::vector<RuleCase> rule_cases() {
    const std::string four = "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C";
    std::vector<RuleCase> cases = {
        sig_case("TYPE-01", "fw:BEGIN_REQ/A;bw:INVALID(9)/A", four, 2),
        sig_case("TYPE-02", "fw:BEGIN_REQ/INVALID(7)", "fw:BEGIN_REQ/C", 1),
        sig_case("TYPE-03", "fw:BEGIN_REQ/U>INVALID(9)", "fw:BEGIN_REQ/U>BEGIN_RESP;fw:END_RESP/C", 1),
        sig_case("TYPE-04", "fw:BEGIN_REQ/A;fw:END_REQ/A", four, 2),
        sig_case("TYPE-05", "fw:BEGIN_REQ/A;bw:END_RESP/A", four, 2),
        sig_case("TYPE-06", "fw:BEGIN_REQ/U>END_RESP", "fw:BEGIN_REQ/U>END_REQ;bw:BEGIN_RESP/C", 1),
        sig_case("TYPE-07", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/U>BEGIN_REQ",
                 "fw:BEGIN_REQ/A;bw:BEGIN_RESP/U>END_RESP", 2),
        sig_case("TYPE-08", "fw:BEGIN_REQ/A;bt", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/C", 2),
        sig_case("TYPE-09", "bt;bt", "bt", 2),
        sig_case("TYPE-10", "fw:BEGIN_REQ/C;bw:BEGIN_RESP/A", "fw:BEGIN_REQ/C", 2),
        sig_case("TYPE-11", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/U>END_RESP;fw:END_RESP/C",
                 "fw:BEGIN_REQ/A;bw:BEGIN_RESP/U>END_RESP", 3),
        sig_case("TYPE-12", "fw:END_RESP/C", "fw:BEGIN_REQ/C", 1),
        sig_case("TYPE-13", "bw:BEGIN_RESP/A;fw:END_RESP/C", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C", 1),
        sig_case("TYPE-14", "fw:BEGIN_REQ/A;fw:BEGIN_REQ/A", "fw:BEGIN_REQ/A;bw:END_REQ/C", 2),
        sig_case("TYPE-15", "fw:BEGIN_REQ/A;fw:END_RESP/C", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C", 2),
        sig_case("TYPE-16", "fw:BEGIN_REQ/A;bw:END_REQ/U>END_RESP", "fw:BEGIN_REQ/A;bw:END_REQ/C", 2),
        sig_case("TYPE-17", "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:END_REQ/A", four, 3),
        sig_case("TYPE-18", "fw:BEGIN_REQ/U>END_REQ;fw:BEGIN_REQ/A",
                 "fw:BEGIN_REQ/U>END_REQ;bw:BEGIN_RESP/A;fw:END_RESP/C", 2),
        sig_case("TYPE-19", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;bw:BEGIN_RESP/A",
                 "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C", 3),
        sig_case("TYPE-20", "fw:BEGIN_REQ/U>BEGIN_RESP;fw:END_RESP/U>END_REQ",
                 "fw:BEGIN_REQ/U>BEGIN_RESP;fw:END_RESP/C", 2),
        sig_case("TYPE-21", "fw:BEGIN_REQ/A", "fw:BEGIN_REQ/A;bw:END_REQ/C", 2),
        sig_case("TYPE-22", "fw:BEGIN_REQ/U>END_REQ", "fw:BEGIN_REQ/U>END_REQ;bw:BEGIN_RESP/C", 2),
        sig_case("TYPE-23", "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:BEGIN_RESP/A", four, 4),
        sig_case("TYPE-24", "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;bw:END_REQ/A",
                 "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C", 3),
        sig_case("TYPE-25", "fw:BEGIN_REQ/U>BEGIN_RESP;fw:BEGIN_REQ/A",
                 "fw:BEGIN_REQ/U>BEGIN_RESP;fw:END_RESP/C", 2),
    };

    auto clean_bt = direct_bt({}, {});
    cases.push_back({"ATTR-01",
                     direct_bt(
                         [](TraceEvent& e) {
                             e.attrs.data_length = 0;
                             e.attrs.data.clear();
                         },
                         [](TraceEvent& e) {
                             e.attrs.data_length = 0;
                             e.attrs.data.clear();
                         }),
                     clean_bt, 1});
    cases.push_back({"ATTR-02",
                     direct_bt([](TraceEvent& e) { e.attrs.response_status = {ResponseKind::Ok, 0}; },
                               {}),
                     clean_bt, 1});
    cases.push_back({"ATTR-03",
                     direct_bt({}, [](TraceEvent& e) { e.attrs.response_status = {}; }), clean_bt,
                     1});
    cases.push_back(
        {"ATTR-04",
         direct_bt({}, [](TraceEvent& e) { e.attrs.response_status = {ResponseKind::Invalid, 9}; }),
         clean_bt, 1});
    cases.push_back({"ATTR-05",
                     direct_bt([](TraceEvent& e) { e.attrs.command = {CommandKind::Invalid, 5}; },
                               [](TraceEvent& e) { e.attrs.command = {CommandKind::Invalid, 5}; }),
                     clean_bt, 1});
    cases.push_back({"ATTR-06",
                     direct_bt([](TraceEvent& e) { e.attrs.data.resize(2); }, {}), clean_bt, 1});

    cases.push_back({"BEH-01",
                     routed_bt(CommandKind::Write, [](TraceEvent& e) { e.attrs.data[0] = 9; }, 1),
                     routed_bt(CommandKind::Write, {}, 0), 2});
    cases.push_back({"BEH-02",
                     routed_bt(CommandKind::Read,
                               [](TraceEvent& e) { e.attrs.data_length = 8; },
                               1),
                     routed_bt(CommandKind::Read, {}, 0), 2});
    cases.push_back({"BEH-03",
                     routed_bt(CommandKind::Read,
                               [](TraceEvent& e) { e.attrs.command = {CommandKind::Ignore, 0}; }, 1),
                     routed_bt(CommandKind::Read, {}, 0), 2});
    cases.push_back(
        {"BEH-04",
         routed_bt(CommandKind::Read,
                   [](TraceEvent& e) { e.attrs.response_status = {ResponseKind::GenericError, 0}; },
                   3),
         routed_bt(CommandKind::Read, {}, 0), 1});
    cases.push_back({"BEH-05",
                     [](Builder& b) {
                         b.signature(1, "fw:BEGIN_REQ/C", true);
                         b.events[1].phase = phase(PhaseKind::EndResp);
                     },
                     [](Builder& b) { b.signature(1, "fw:BEGIN_REQ/C", true); }, 2});
    return cases;
}

} // namespace vpt
