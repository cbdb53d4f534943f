#include "support.hpp"

#include "vpcheck/error.hpp"

#include <doctest.h>

#include <filesystem>

using namespace vpt;

namespace {

const std::string kHeader =
    R"({"format":"vptrace-1","design":"d","modules":[)"
    R"({"path":"top.cpu","root":"top","role":"INITIATOR"},)"
    R"({"path":"top.bus","root":"top","role":"INTERCONNECT"},)"
    R"({"path":"top.mem","root":"top","role":"TARGET"}]})"
    "\n";

ErrorCode code_of(const std::string& text) {
    try {
        parse_trace(text);
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error for: " << text);
    return ErrorCode::IoError;
}

} // namespace

TEST_CASE("event record maps field by field") {
    auto t = parse_trace(kHeader +
                         R"({"kind":"CALL","if":"B_TRANSPORT","t":100,"tx":7,"caller":"top.cpu",)"
                         R"("callee":"top.bus","cmd":"READ","addr":"0x1000","len":4,)"
                         R"("data":"deadbeef","resp":"INCOMPLETE","delay":0})");
    REQUIRE(t.events.size() == 1);
    const auto& ev = t.events[0];
    CHECK(ev.seq_no == 1);
    CHECK(ev.kind == EventKind::Call);
    CHECK(ev.interface == Interface::BTransport);
    CHECK(ev.time == SimTime(100));
    CHECK(ev.tx_id == 7);
    CHECK(ev.caller.instance_path == "top.cpu");
    CHECK(ev.caller.role == Role::Initiator);
    CHECK(ev.callee.role == Role::Interconnect);
    CHECK(ev.attrs.command.kind == CommandKind::Read);
    CHECK(ev.attrs.address == 0x1000);
    CHECK(ev.attrs.data_length == 4);
    CHECK(ev.attrs.data == std::vector<std::uint8_t>{0xde, 0xad, 0xbe, 0xef});
    CHECK(ev.attrs.response_status.kind == ResponseKind::Incomplete);
    CHECK(ev.delay == SimTime(0));
    CHECK_FALSE(ev.phase);
    CHECK_FALSE(ev.return_status);
}

TEST_CASE("malformed records are rejected with their line") {
    auto missing_tx = kHeader + R"({"kind":"CALL","if":"B_TRANSPORT","t":100,"caller":"top.cpu",)"
                                R"("callee":"top.bus","cmd":"READ","addr":"0x0","len":4,)"
                                R"("data":"00000000","resp":"INCOMPLETE","delay":0})";
    try {
        parse_trace(missing_tx);
        FAIL("accepted a record without tx");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SyntaxError);
        CHECK(e.location() == 2);
        CHECK(std::string(e.what()).find("tx") != std::string::npos);
    }

    auto misspelled = kHeader +
                      R"({"kind":"CALL","if":"NB_TRANSPORT_FW","t":1,"tx":1,"caller":"top.cpu",)"
                      R"("callee":"top.bus","phase":"BEGIN_RSP","cmd":"READ","addr":"0x0","len":4,)"
                      R"("data":"00000000","resp":"INCOMPLETE","delay":0})";
    CHECK(code_of(misspelled) == ErrorCode::UnknownEnum);

    auto unknown_module = kHeader +
                          R"({"kind":"CALL","if":"B_TRANSPORT","t":1,"tx":1,"caller":"top.gpu",)"
                          R"("callee":"top.bus","cmd":"READ","addr":"0x0","len":4,)"
                          R"("data":"00000000","resp":"INCOMPLETE","delay":0})";
    CHECK(code_of(unknown_module) == ErrorCode::UnknownModule);

    CHECK(code_of(R"({"format":"vptrace-2","design":"d","modules":[]})") ==
          ErrorCode::VersionMismatch);
    CHECK(code_of("{not json") == ErrorCode::SyntaxError);
    CHECK(code_of("") == ErrorCode::SyntaxError);
}

TEST_CASE("out-of-vocabulary codes survive as INVALID(n)") {
    Builder b;
    b.bt(1, 0, 0, 0);
    b.events[0].attrs.command = {CommandKind::Invalid, 42};
    b.events[1].attrs.response_status = {ResponseKind::Invalid, -3};
    auto text = serialize_trace(b.trace());
    CHECK(text.find("\"INVALID(42)\"") != std::string::npos);
    CHECK(parse_trace(text) == b.trace());
}

TEST_CASE("serialize then parse is the identity") {
    Builder b;
    b.signature(1, "fw:BEGIN_REQ/A;bw:END_REQ/A;bw:BEGIN_RESP/A;fw:END_RESP/C", true);
    b.bt(2, 500, 600, 7, true, CommandKind::Write, 0xffffffffffffull);
    auto t = b.trace();
    auto text = serialize_trace(t);
    CHECK(parse_trace(text) == t);
    CHECK(serialize_trace(parse_trace(text)) == text);
}

TEST_CASE("gzip files are read transparently") {
    Builder b;
    b.bt(1, 10, 20, 0);
    auto dir = std::filesystem::temp_directory_path() / "vpcheck_gz_test";
    std::filesystem::create_directories(dir);
    write_trace_file(dir / "t.trace.gz", b.trace());
    write_trace_file(dir / "t.trace", b.trace());
    CHECK(read_trace_file(dir / "t.trace.gz") == b.trace());
    CHECK(read_file_bytes(dir / "t.trace.gz") == read_file_bytes(dir / "t.trace"));
    CHECK(std::filesystem::file_size(dir / "t.trace.gz") !=
          std::filesystem::file_size(dir / "t.trace"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("stream validation") {
    SUBCASE("non-decreasing time passes") {
        Builder b;
        b.bt(1, 0, 10, 0);
        b.bt(2, 10, 20, 0);
        CHECK_NOTHROW(validate_stream(b.events));
    }
    SUBCASE("time regression at seq 2") {
        Builder b;
        b.bt(1, 10, 5, 0);
        try {
            validate_stream(b.events);
            FAIL("accepted a time regression");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::TimeRegression);
            CHECK(e.location() == 2);
        }
    }
    SUBCASE("backward path called by an initiator") {
        Builder b;
        auto a = attrs(CommandKind::Read, 0, 4);
        b.call(1, 0, Interface::NbTransportBw, "top.cpu", "top.mem", phase(PhaseKind::BeginResp), a);
        b.ret(1, 0, Interface::NbTransportBw, "top.cpu", "top.mem", phase(PhaseKind::BeginResp), a,
              sync(SyncKind::Accepted));
        CHECK_THROWS_AS(validate_stream(b.events), Error);
        try {
            validate_stream(b.events);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RoleMismatch);
            CHECK(e.location() == 1);
        }
    }
    SUBCASE("forward path called by a target") {
        Builder b;
        auto a = attrs(CommandKind::Read, 0, 4);
        b.call(1, 0, Interface::NbTransportFw, "top.mem", "top.bus", phase(PhaseKind::BeginReq), a);
        b.ret(1, 0, Interface::NbTransportFw, "top.mem", "top.bus", phase(PhaseKind::BeginReq), a,
              sync(SyncKind::Accepted));
        try {
            validate_stream(b.events);
            FAIL("accepted");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::RoleMismatch);
        }
    }
}

TEST_CASE("hex and address helpers") {
    CHECK(to_hex({0x00, 0xab}) == "00ab");
    CHECK(from_hex("00AB") == std::vector<std::uint8_t>{0x00, 0xab});
    CHECK_FALSE(from_hex("abc"));
    CHECK_FALSE(from_hex("zz"));
    CHECK(format_address(0x1000) == "0x1000");
    CHECK(parse_address("0xFF") == 0xffu);
    CHECK_FALSE(parse_address("255"));
}
