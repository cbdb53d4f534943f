#include "support.hpp"

#include "vpcheck/error.hpp"
#include "vpcheck/report.hpp"
#include "vpcheck/synth_vp.hpp"

#include <doctest.h>

#include <set>

using namespace vpt;

namespace {

bool has_line(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("clean routing trace passes") {
    auto cfg = routing_replica(1);
    auto r = run_check(generate_trace(cfg), emit_reference_spec(cfg));
    CHECK(exit_code(r) == 0);
    CHECK(r.fail == 0);
    CHECK(r.n_trans == 10);
    CHECK(r.n_types == 1);
    CHECK(r.timing_model == "LT");
    CHECK(r.phase2_ran);
    auto text = emit_report(r, "text");
    CHECK(has_line(text, "Pass: " + std::to_string(r.pass) + ", Fail: 0"));
    CHECK(text.find("\x1b[") == std::string::npos);
}

TEST_CASE("protocol violations gate the spec phase") {
    auto cfg = routing_replica(1);
    auto clean = generate_trace(cfg);
    auto faulty = inject_fault(clean, {FaultType::FT1, FaultSubKind::RespInit, 4, 1, {}});
    auto r = run_check(faulty.trace, emit_reference_spec(cfg));
    CHECK(exit_code(r) == 1);
    CHECK(r.phase2_gated);
    CHECK_FALSE(r.phase2_ran);
    CHECK(r.faulty_transactions == 4);
    for (const auto& p : r.properties)
        CHECK((p.kind != PropertyKind::Functional && p.kind != PropertyKind::Timing));
    CHECK(has_line(emit_report(r, "text"), "--force-phase2"));
}

TEST_CASE("forced spec phase lists functional failures") {
    auto cfg = routing_replica(1);
    auto faulty = inject_fault(generate_trace(cfg),
                               {FaultType::FT2, FaultSubKind::Addr, 6, 2, cfg.topology.targets});
    auto r = run_check(faulty.trace, emit_reference_spec(cfg), {true, TimingMode::UpperBound});
    CHECK(exit_code(r) == 1);
    CHECK(r.phase2_ran);
    std::set<std::uint64_t> flagged;
    for (const auto& v : r.violations) {
        CHECK(v.kind == PropertyKind::Functional);
        flagged.insert(v.tx_id);
    }
    std::set<std::uint64_t> truth;
    for (const auto& g : faulty.truth)
        truth.insert(g.tx_id);
    CHECK(flagged == truth);
}

TEST_CASE("two failed properties over four transactions") {
    // Two FT1 sub-kinds on disjoint victims of the routing replica.
    auto cfg = routing_replica(1);
    auto clean = generate_trace(cfg);
    for (std::uint64_t seed = 1;; ++seed) {
        REQUIRE(seed < 100);
        auto a = inject_fault(clean, {FaultType::FT1, FaultSubKind::RespInit, 2, seed, {}});
        auto b = inject_fault(a.trace, {FaultType::FT1, FaultSubKind::LenMod, 2, seed + 1000, {}});
        std::set<std::uint64_t> ids;
        for (const auto* t : {&a.truth, &b.truth})
            for (const auto& g : *t)
                ids.insert(g.tx_id);
        if (ids.size() != 4)
            continue;
        auto r = run_check(b.trace, emit_reference_spec(cfg));
        CHECK(r.fail == 2);
        CHECK(r.faulty_transactions == 4);
        CHECK(has_line(emit_report(r, "text"), "Fail=2, FTrans=4"));
        break;
    }
}

TEST_CASE("hand-built report totals") {
    Report r;
    r.design = "routing-model";
    r.properties = {{"ATTR-02", PropertyKind::Attribute, "x", 2},
                    {"BEH-02", PropertyKind::Behavior, "y", 2}};
    for (int i = 0; i < 20; ++i)
        r.properties.push_back({"P" + std::to_string(i), PropertyKind::Type, "z", 0});
    r.properties_total = 22;
    r.pass = 20;
    r.fail = 2;
    r.faulty_transactions = 4;
    auto text = emit_report(r, "text");
    CHECK(has_line(text, "Totals: Total=22, Pass=20, Fail=2, FTrans=4"));
    CHECK(has_line(text, "Pass: 20, Fail: 2"));
}

TEST_CASE("json report") {
    auto cfg = at_replica(3);
    auto faulty = inject_fault(generate_trace(cfg),
                               {FaultType::FT1, FaultSubKind::PhaseOrder, 7, 3, {}});
    auto r = run_check(faulty.trace, emit_reference_spec(cfg), {true, TimingMode::UpperBound});
    auto json = emit_report(r, "json");
    auto back = report_from_json(json);
    CHECK(emit_report(back, "json") == json);
    CHECK(back.violations == r.violations);
    CHECK(back.timings.empty());
    CHECK(json.find("\"timings\"") == std::string::npos);

    auto with_timings = emit_report(r, "json", {false, true});
    CHECK(report_from_json(with_timings).timings.size() == r.timings.size());

    CHECK_THROWS_AS(emit_report(r, "xml"), Error);
    CHECK_THROWS_AS(report_from_json("{}"), Error);
    CHECK_THROWS_AS(report_from_json(R"({"schema":"other"})"), Error);
}

TEST_CASE("colored text only on request") {
    Report r;
    r.fail = 1;
    r.properties_total = 1;
    r.properties = {{"ATTR-01", PropertyKind::Attribute, "d", 1}};
    CHECK(emit_report(r, "text", {true, false}).find("\x1b[31m") != std::string::npos);
}
