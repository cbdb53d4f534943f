#include "vpcheck/trace_model.hpp"

#include "vpcheck/error.hpp"

#include <algorithm>
#include <map>

namespace vpcheck {

namespace {

struct OpenCall {
    const TraceEvent* call;
    std::size_t depth;
};

struct PendingTx {
    std::vector<OpenCall> stack;
    std::vector<Sequence> done;
};

Sequence make_sequence(const TraceEvent& call, const TraceEvent& ret, std::size_t depth) {
    Sequence s;
    s.interface = call.interface;
    s.from = call.caller;
    s.to = call.callee;
    s.phase_at_call = call.phase;
    s.phase_at_return = ret.phase;
    s.status = ret.return_status;
    s.attrs_at_call = call.attrs;
    s.attrs_at_return = ret.attrs;
    s.t_call = call.time;
    s.t_return = ret.time;
    s.delay_at_call = call.delay;
    s.delay_at_return = ret.delay;
    s.call_seq_no = call.seq_no;
    s.return_seq_no = ret.seq_no;
    s.depth = depth;
    return s;
}

} // namespace

const ModuleRef& TransactionLifetime::initiator() const {
    for (const auto& s : sequences) {
        if (s.from.role == Role::Initiator)
            return s.from;
        if (s.to.role == Role::Initiator)
            return s.to;
    }
    return sequences.front().from;
}

std::vector<const Sequence*> initiator_level(const TransactionLifetime& tl) {
    std::vector<const Sequence*> out;
    if (tl.sequences.empty())
        return out;
    const auto& im = tl.initiator().instance_path;
    for (const auto& s : tl.sequences)
        if (s.from.instance_path == im || s.to.instance_path == im)
            out.push_back(&s);
    return out;
}

const Sequence& final_sequence(const TransactionLifetime& tl) {
    return *std::max_element(tl.sequences.begin(), tl.sequences.end(),
                             [](const Sequence& a, const Sequence& b) {
                                 return a.return_seq_no < b.return_seq_no;
                             });
}

std::vector<const Sequence*> nested_children(const TransactionLifetime& tl,
                                             const Sequence& parent) {
    std::vector<const Sequence*> out;
    for (const auto& s : tl.sequences)
        if (s.depth == parent.depth + 1 && s.call_seq_no > parent.call_seq_no &&
            s.return_seq_no < parent.return_seq_no)
            out.push_back(&s);
    return out;
}

std::vector<TransactionLifetime> build_lifetimes(std::span<const TraceEvent> events) {
    std::map<std::uint64_t, PendingTx> pending;

    for (const auto& ev : events) {
        auto& tx = pending[ev.tx_id];
        if (ev.kind == EventKind::Call) {
            tx.stack.push_back({&ev, tx.stack.size()});
            continue;
        }
        auto it = std::find_if(tx.stack.rbegin(), tx.stack.rend(), [&](const OpenCall& oc) {
            return oc.call->interface == ev.interface &&
                   oc.call->callee.instance_path == ev.callee.instance_path;
        });
        if (it == tx.stack.rend())
            throw Error(ErrorCode::UnmatchedReturn,
                        "tx " + std::to_string(ev.tx_id) + " has no open " +
                            std::string(to_string(ev.interface)) + " call on " +
                            ev.callee.instance_path,
                        ev.seq_no);
        tx.done.push_back(make_sequence(*it->call, ev, it->depth));
        tx.stack.erase(std::next(it).base());
    }

    std::vector<TransactionLifetime> out;
    out.reserve(pending.size());
    for (auto& [id, tx] : pending) {
        if (!tx.stack.empty()) {
            const auto* first = tx.stack.front().call;
            throw Error(ErrorCode::DanglingCall,
                        "tx " + std::to_string(id) + " " +
                            std::string(to_string(first->interface)) + " call on " +
                            first->callee.instance_path + " never returns",
                        first->seq_no);
        }
        std::sort(tx.done.begin(), tx.done.end(), [](const Sequence& a, const Sequence& b) {
            if (a.t_call != b.t_call)
                return a.t_call < b.t_call;
            return a.call_seq_no < b.call_seq_no;
        });
        for (std::size_t i = 0; i < tx.done.size(); ++i)
            tx.done[i].index = i + 1;
        out.push_back({id, std::move(tx.done)});
    }
    return out;
}

std::vector<TraceEvent> lifetime_events(const TransactionLifetime& tl) {
    std::vector<TraceEvent> out;
    out.reserve(tl.sequences.size() * 2);
    for (const auto& s : tl.sequences) {
        TraceEvent call;
        call.seq_no = s.call_seq_no;
        call.time = s.t_call;
        call.kind = EventKind::Call;
        call.interface = s.interface;
        call.caller = s.from;
        call.callee = s.to;
        call.tx_id = tl.tx_id;
        call.phase = s.phase_at_call;
        call.delay = s.delay_at_call;
        call.attrs = s.attrs_at_call;

        TraceEvent ret = call;
        ret.seq_no = s.return_seq_no;
        ret.time = s.t_return;
        ret.kind = EventKind::Return;
        ret.phase = s.phase_at_return;
        ret.delay = s.delay_at_return;
        ret.attrs = s.attrs_at_return;
        ret.return_status = s.status;

        out.push_back(std::move(call));
        out.push_back(std::move(ret));
    }
    std::sort(out.begin(), out.end(),
              [](const TraceEvent& a, const TraceEvent& b) { return a.seq_no < b.seq_no; });
    return out;
}

std::vector<TraceEvent> lifetimes_to_events(std::span<const TransactionLifetime> lifetimes) {
    std::vector<TraceEvent> out;
    for (const auto& tl : lifetimes) {
        auto evs = lifetime_events(tl);
        out.insert(out.end(), std::make_move_iterator(evs.begin()),
                   std::make_move_iterator(evs.end()));
    }
    std::sort(out.begin(), out.end(),
              [](const TraceEvent& a, const TraceEvent& b) { return a.seq_no < b.seq_no; });
    return out;
}

SimTime total_delay(const TransactionLifetime& tl) {
    const auto& first = tl.sequences.front();
    const auto& last = final_sequence(tl);
    std::uint64_t elapsed = last.t_return >= first.t_call ? last.t_return.ps - first.t_call.ps : 0;
    return SimTime(elapsed) + last.delay_at_return;
}

AccessPath to_access_path(const TransactionLifetime& tl, std::optional<int> tt) {
    const Sequence* deepest = nullptr;
    for (const auto& s : tl.sequences)
        if (s.to.role == Role::Target && (!deepest || s.depth > deepest->depth))
            deepest = &s;
    if (!deepest)
        throw Error(ErrorCode::NoTargetReached,
                    "tx " + std::to_string(tl.tx_id) + " never reaches a target module");

    const auto& first = tl.sequences.front();
    AccessPath ap;
    ap.im = tl.initiator();
    ap.tm = deepest->to;
    ap.tid = tl.tx_id;
    ap.tt = tt;
    ap.tadr = first.attrs_at_call.address;
    ap.cmd = first.attrs_at_call.command;
    ap.td = total_delay(tl);
    ap.final_sequence = final_sequence(tl).index;
    return ap;
}

SapResult build_sap(std::span<const TransactionLifetime> lifetimes,
                    std::span<const std::optional<int>> types) {
    SapResult out;
    for (std::size_t i = 0; i < lifetimes.size(); ++i) {
        try {
            out.sap.paths.push_back(to_access_path(lifetimes[i], types[i]));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoTargetReached)
                throw;
            out.diagnostics.push_back({lifetimes[i].tx_id, e.what()});
        }
    }
    std::sort(out.sap.paths.begin(), out.sap.paths.end(),
              [](const AccessPath& a, const AccessPath& b) { return a.tid < b.tid; });
    std::sort(out.diagnostics.begin(), out.diagnostics.end(),
              [](const SapDiagnostic& a, const SapDiagnostic& b) { return a.tx_id < b.tx_id; });
    return out;
}

} // namespace vpcheck
