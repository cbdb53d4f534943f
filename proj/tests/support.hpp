#pragma once

#include "vpcheck/base_protocol.hpp"
#include "vpcheck/trace_ingest.hpp"
#include "vpcheck/trace_model.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace vpt {

using namespace vpcheck;

inline TxAttributes attrs(CommandKind cmd, std::uint64_t addr, std::uint64_t len,
                          ResponseKind resp = ResponseKind::Incomplete) {
    TxAttributes a;
    a.command = {cmd, 0};
    a.address = addr;
    a.data_length = len;
    a.data.assign(len, 0);
    a.response_status = {resp, 0};
    return a;
}

inline Phase phase(PhaseKind k) {
    return {k, 0};
}

inline SyncStatus sync(SyncKind k) {
    return {k, 0};
}

/// Hand-built traces over a fixed module table:
/// top.cpu (INITIATOR), top.bus (INTERCONNECT), top.mem / top.mem1 (TARGET).
struct Builder {
    TraceHeader header;
    std::vector<TraceEvent> events;

    Builder() {
        header.design_name = "unit";
        header.modules = {{"top", "top.cpu", Role::Initiator},
                          {"top", "top.cpu1", Role::Initiator},
                          {"top", "top.bus", Role::Interconnect},
                          {"top", "top.mem", Role::Target},
                          {"top", "top.mem1", Role::Target}};
    }

    const ModuleRef& m(const std::string& path) const {
        const auto* r = header.find(path);
        if (!r)
            throw std::invalid_argument("no module " + path);
        return *r;
    }

    TraceEvent& call(std::uint64_t tx, std::uint64_t t, Interface itf, const std::string& caller,
                     const std::string& callee, std::optional<Phase> ph, TxAttributes a,
                     std::uint64_t delay = 0) {
        TraceEvent ev;
        ev.seq_no = events.size() + 1;
        ev.time = SimTime(t);
        ev.kind = EventKind::Call;
        ev.interface = itf;
        ev.caller = m(caller);
        ev.callee = m(callee);
        ev.tx_id = tx;
        ev.phase = ph;
        ev.delay = SimTime(delay);
        ev.attrs = std::move(a);
        events.push_back(std::move(ev));
        return events.back();
    }

    TraceEvent& ret(std::uint64_t tx, std::uint64_t t, Interface itf, const std::string& caller,
                    const std::string& callee, std::optional<Phase> ph, TxAttributes a,
                    std::optional<SyncStatus> st = std::nullopt, std::uint64_t delay = 0) {
        auto& ev = call(tx, t, itf, caller, callee, ph, std::move(a), delay);
        ev.kind = EventKind::Return;
        ev.return_status = st;
        return ev;
    }

    /// One b_transport from cpu to mem, optionally through the bus.
    void bt(std::uint64_t tx, std::uint64_t t_call, std::uint64_t t_ret, std::uint64_t delay,
            bool via_bus = false, CommandKind cmd = CommandKind::Read, std::uint64_t addr = 0x10) {
        auto in = attrs(cmd, addr, 4);
        auto out = attrs(cmd, addr, 4, ResponseKind::Ok);
        auto bti = Interface::BTransport;
        if (via_bus) {
            call(tx, t_call, bti, "top.cpu", "top.bus", {}, in);
            call(tx, t_call, bti, "top.bus", "top.mem", {}, in);
            ret(tx, t_ret, bti, "top.bus", "top.mem", {}, out, {}, delay);
            ret(tx, t_ret, bti, "top.cpu", "top.bus", {}, out, {}, delay);
        } else {
            call(tx, t_call, bti, "top.cpu", "top.mem", {}, in);
            ret(tx, t_ret, bti, "top.cpu", "top.mem", {}, out, {}, delay);
        }
    }

    /// Events following a signature text; element i happens at t0 + 10 i.
    /// The response status turns OK once the target has responded.
    void signature(std::uint64_t tx, const std::string& text, bool via_bus = false,
                   std::uint64_t t0 = 100) {
        auto sig = parse_signature(text);
        if (!sig)
            throw std::invalid_argument("bad signature " + text);
        bool responded = false;
        std::uint64_t t = t0;
        for (const auto& e : sig->elems) {
            if (e.blocking) {
                bt(tx, t, t, 0, via_bus);
                t += 10;
                continue;
            }
            bool fw = e.dir == Direction::Fw;
            if (!fw && e.phase_in.kind == PhaseKind::BeginResp)
                responded = true;
            bool after = responded ||
                         (fw && e.phase_in.kind == PhaseKind::BeginReq &&
                          (e.status.kind == SyncKind::Completed ||
                           (e.phase_out && e.phase_out->kind == PhaseKind::BeginResp)));
            auto itf = fw ? Interface::NbTransportFw : Interface::NbTransportBw;
            std::string from = fw ? "top.cpu" : "top.mem";
            std::string to = fw ? "top.mem" : "top.cpu";
            auto a_in = attrs(CommandKind::Read, 0x10, 4,
                              responded ? ResponseKind::Ok : ResponseKind::Incomplete);
            auto a_out = attrs(CommandKind::Read, 0x10, 4,
                               after ? ResponseKind::Ok : ResponseKind::Incomplete);
            Phase out_ph = e.phase_out ? *e.phase_out : e.phase_in;
            if (via_bus) {
                call(tx, t, itf, from, "top.bus", e.phase_in, a_in);
                call(tx, t, itf, "top.bus", to, e.phase_in, a_in);
                ret(tx, t, itf, "top.bus", to, out_ph, a_out, e.status);
                ret(tx, t, itf, from, "top.bus", out_ph, a_out, e.status);
            } else {
                call(tx, t, itf, from, to, e.phase_in, a_in);
                ret(tx, t, itf, from, to, out_ph, a_out, e.status);
            }
            responded = after;
            t += 10;
        }
    }

    Trace trace() const { return {header, events}; }
    std::vector<TransactionLifetime> lifetimes() const { return build_lifetimes(events); }
    TransactionLifetime lifetime() const {
        auto l = lifetimes();
        if (l.size() != 1)
            throw std::logic_error("expected one lifetime");
        return l.front();
    }
};

} // namespace vpt
