#include "rule_cases.hpp"
#include "support.hpp"

#include "vpcheck/error.hpp"
#include "vpcheck/rule_engine.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace vpt;

namespace {

std::set<std::string> texts(const std::vector<TransactionType>& types) {
    std::set<std::string> s;
    for (const auto& t : types)
        s.insert(t.signature.text());
    return s;
}

// Independent enumeration: breadth-first over (state, path) using only the
// edge table, collecting every path that reaches an accepting state.
std::set<std::string> bfs_paths(const ProtocolFsm& fsm) {
    std::set<std::string> out;
    std::vector<std::pair<ProtocolState, std::string>> frontier{{fsm.initial, ""}};
    while (!frontier.empty()) {
        std::vector<std::pair<ProtocolState, std::string>> next;
        for (const auto& [s, path] : frontier) {
            if (is_accepting(s)) {
                out.insert(path);
                continue;
            }
            for (const auto& e : fsm.edges)
                if (e.from == s)
                    next.push_back({e.to, path.empty() ? e.elem.text() : path + ";" + e.elem.text()});
        }
        frontier = std::move(next);
    }
    return out;
}

std::vector<Violation> all_violations(const TransactionLifetime& tl) {
    auto c = classify(tl);
    std::vector<Violation> v;
    if (auto t = check_type_rules(tl, c))
        v.push_back(*t);
    auto a = check_attribute_rules(tl, c);
    auto b = check_behavior_rules(tl);
    v.insert(v.end(), a.begin(), a.end());
    v.insert(v.end(), b.begin(), b.end());
    return v;
}

} // namespace

TEST_CASE("thirteen base protocol types") {
    auto types = enumerate_base_protocol_types();
    CHECK(types.size() == 13);
    auto s = texts(types);
    CHECK(s.size() == 13);
    CHECK(s.count("bt"));
    CHECK(s.count("fw:BEGIN_REQ/C"));
    CHECK(s == bfs_paths(base_protocol_fsm()));
    for (std::size_t i = 0; i < types.size(); ++i) {
        CHECK(types[i].id == static_cast<int>(i + 1));
        CHECK((types[i].timing_model == TimingModel::LT) == (types[i].signature.text() == "bt"));
    }
    CHECK(types[0].signature.text() == "bt");
}

TEST_CASE("signature rendering") {
    SUBCASE("bt") {
        Builder b;
        b.bt(1, 0, 0, 0, true);
        CHECK(signature_of(b.lifetime()).text() == "bt");
    }
    SUBCASE("four phases") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C", true);
        CHECK(signature_of(b.lifetime()).text() ==
              "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C");
    }
    SUBCASE("updated returns") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/U>END_REQ;bw:BEGIN_RESP/C");
        CHECK(signature_of(b.lifetime()).text() == "fw:BEGIN_REQ/U>END_REQ;bw:BEGIN_RESP/C");
    }
    SUBCASE("END_RESP accepted reads as completed") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/A");
        CHECK(signature_of(b.lifetime()).text() == "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C");
    }
    SUBCASE("missing phase") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/C");
        b.events[0].phase.reset();
        b.events[1].phase.reset();
        CHECK_THROWS_AS(signature_of(b.lifetime()), Error);
    }
    SUBCASE("parse and render agree") {
        for (const auto& t : reference_types())
            CHECK(parse_signature(t.signature.text()) == t.signature);
        CHECK_FALSE(parse_signature("fw:BEGIN_REQ"));
        CHECK_FALSE(parse_signature("fw:BEGIN_REQ/U"));
        CHECK_FALSE(parse_signature("xx:BEGIN_REQ/A"));
        CHECK_FALSE(parse_signature(""));
    }
}

TEST_CASE("classification") {
    SUBCASE("every reference type classifies to itself") {
        for (const auto& t : reference_types()) {
            Builder b;
            b.signature(1, t.signature.text(), true);
            CHECK(type_id_of(classify(b.lifetime())) == t.id);
        }
    }
    SUBCASE("BEGIN_RESP before END_REQ after BEGIN_RESP") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/A;bw:BEGIN_RESP/A;bw:END_REQ/A;fw:END_RESP/C");
        auto c = classify(b.lifetime());
        auto* tv = std::get_if<TypeViolation>(&c);
        REQUIRE(tv);
        CHECK(tv->first_faulty_index == 3);
        CHECK(tv->first_faulty_sequence == 3);
        CHECK(std::find(tv->expected_next.begin(), tv->expected_next.end(), "fw:END_RESP/C") !=
              tv->expected_next.end());
    }
    SUBCASE("truncated before END_RESP") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:BEGIN_RESP/A");
        auto tl = b.lifetime();
        auto c = classify(tl);
        auto* tv = std::get_if<TypeViolation>(&c);
        REQUIRE(tv);
        CHECK(tv->first_faulty_index == 4);
        CHECK(tv->first_faulty_sequence == tl.n_t() + 1);
        CHECK(tv->expected_next == std::vector<std::string>{"fw:END_RESP/C"});
    }
    SUBCASE("routed lifetimes map elements to sequence positions") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/A;fw:END_RESP/C", true);
        auto c = classify(b.lifetime());
        auto* tv = std::get_if<TypeViolation>(&c);
        REQUIRE(tv);
        CHECK(tv->first_faulty_index == 2);
        CHECK(tv->first_faulty_sequence == 3); // outer hop of the second element
    }
}

TEST_CASE("rule catalog shape") {
    const auto& cat = rule_catalog();
    CHECK(cat.size() == 36);
    auto count = [&](RuleCategory c) {
        return std::count_if(cat.begin(), cat.end(), [&](const RuleId& r) { return r.category == c; });
    };
    CHECK(count(RuleCategory::Type) == 25);
    CHECK(count(RuleCategory::Attribute) == 6);
    CHECK(count(RuleCategory::Behavior) == 5);
    std::set<std::string> codes;
    for (const auto& r : cat)
        codes.insert(r.code);
    CHECK(codes.size() == 36);
    CHECK(find_rule("BEH-04"));
    CHECK_FALSE(find_rule("BEH-06"));
}

TEST_CASE("each rule fires on its trigger and stays quiet on its sibling") {
    auto cases = rule_cases();
    REQUIRE(cases.size() == 36);
    for (const auto& rc : cases) {
        CAPTURE(rc.rule);
        Builder bad;
        rc.trigger(bad);
        auto v = all_violations(bad.lifetime());
        auto it = std::find_if(v.begin(), v.end(), [&](const Violation& x) { return x.rule == rc.rule; });
        REQUIRE(it != v.end());
        CHECK(it->sequence_index == rc.sequence_index);
        CHECK(it->tx_id == 1);

        Builder good;
        rc.clean(good);
        CHECK(all_violations(good.lifetime()).empty());
    }
}

TEST_CASE("attribute rules") {
    SUBCASE("zero data length at the first call") {
        Builder b;
        b.bt(1, 0, 0, 0);
        b.events[0].attrs.data_length = 0;
        b.events[0].attrs.data.clear();
        auto v = check_attribute_rules(b.lifetime());
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "ATTR-01");
        CHECK(v[0].sequence_index == 1);
    }
    SUBCASE("preset response status") {
        Builder b;
        b.bt(1, 0, 0, 0);
        b.events[0].attrs.response_status = {ResponseKind::Ok, 0};
        auto v = check_attribute_rules(b.lifetime());
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "ATTR-02");
    }
    SUBCASE("clean read") {
        Builder b;
        b.bt(1, 0, 0, 0, true);
        CHECK(check_attribute_rules(b.lifetime()).empty());
    }
    SUBCASE("END_REQ completion needs no response") {
        Builder b;
        b.signature(1, "fw:BEGIN_REQ/A;bw:END_REQ/C");
        CHECK(check_attribute_rules(b.lifetime()).empty());
    }
}

TEST_CASE("behavior rules") {
    SUBCASE("length changed by the interconnect") {
        Builder b;
        b.bt(1, 0, 0, 0, true);
        b.events[1].attrs.data_length = 8;
        auto v = check_behavior_rules(b.lifetime());
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "BEH-02");
        REQUIRE(v[0].module);
        CHECK(v[0].module->instance_path == "top.bus");
        CHECK(v[0].observed == "8");
        CHECK(v[0].expected == "4");
    }
    SUBCASE("address translation is legal") {
        Builder b;
        b.bt(1, 0, 0, 0, true, CommandKind::Read, 0x1000);
        b.events[1].attrs.address = 0x000;
        b.events[2].attrs.address = 0x000;
        CHECK(check_behavior_rules(b.lifetime()).empty());
    }
    SUBCASE("write payload rewritten") {
        Builder b;
        b.bt(1, 0, 0, 0, true, CommandKind::Write);
        b.events[1].attrs.data = {9, 9, 9, 9};
        auto v = check_behavior_rules(b.lifetime());
        REQUIRE(v.size() == 1);
        CHECK(v[0].rule == "BEH-01");
        CHECK(v[0].sequence_index == 2);
    }
    SUBCASE("read data flows back") {
        Builder b;
        b.bt(1, 0, 0, 0, true, CommandKind::Read);
        b.events[2].attrs.data = {1, 2, 3, 4};
        b.events[3].attrs.data = {5, 6, 7, 8};
        CHECK(check_behavior_rules(b.lifetime()).empty());
    }
}

TEST_CASE("aggregation into properties") {
    SUBCASE("clean LT trace") {
        Builder b;
        for (std::uint64_t i = 1; i <= 10; ++i)
            b.bt(i, i * 10, i * 10, 0, true);
        auto l = b.lifetimes();
        std::vector<Classification> c;
        for (const auto& tl : l)
            c.push_back(classify(tl));
        auto pc = check_protocol(l, c);
        CHECK(pc.violations.empty());
        CHECK(pc.properties.size() == 12); // TYPE-09 + 6 ATTR + 5 BEH
        CHECK(std::all_of(pc.properties.begin(), pc.properties.end(),
                          [](const Property& p) { return p.passed(); }));
    }
    SUBCASE("one lifetime breaks ATTR-01 twice") {
        Builder b;
        b.bt(1, 0, 0, 0, true);
        for (int i : {0, 1}) {
            b.events[i].attrs.data_length = 0;
            b.events[i].attrs.data.clear();
        }
        b.bt(2, 5, 5, 0, true);
        auto l = b.lifetimes();
        std::vector<Classification> c;
        for (const auto& tl : l)
            c.push_back(classify(tl));
        auto pc = check_protocol(l, c);
        std::set<std::string> failed;
        std::set<std::uint64_t> txs;
        for (const auto& p : pc.properties)
            if (!p.passed())
                failed.insert(p.id);
        for (const auto& v : pc.violations)
            txs.insert(v.tx_id);
        CHECK(failed == std::set<std::string>{"ATTR-01"});
        CHECK(txs == std::set<std::uint64_t>{1});
        CHECK(pc.violations.size() == 2);
    }
}
