#include "vpcheck/base_protocol.hpp"

#include "vpcheck/error.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <set>
#include <stdexcept>

namespace vpcheck {

namespace {

std::string status_text(SyncStatus s) {
    switch (s.kind) {
    case SyncKind::Accepted: return "A";
    case SyncKind::Updated: return "U";
    case SyncKind::Completed: return "C";
    case SyncKind::Invalid: return to_string(s);
    }
    return "?";
}

std::optional<SyncStatus> parse_status_text(std::string_view s) {
    if (s == "A") return SyncStatus{SyncKind::Accepted, 0};
    if (s == "U") return SyncStatus{SyncKind::Updated, 0};
    if (s == "C") return SyncStatus{SyncKind::Completed, 0};
    auto v = parse_sync(s);
    if (v && v->kind == SyncKind::Invalid)
        return v;
    return std::nullopt;
}

ProtocolFsm make_fsm() {
    using S = ProtocolState;
    using P = PhaseKind;
    using K = SyncKind;
    constexpr auto fw = Direction::Fw;
    constexpr auto bw = Direction::Bw;
    auto nb = [](Direction d, PhaseKind in, SyncKind st, std::optional<PhaseKind> out = {}) {
        return SignatureElem::nb(d, in, st, out);
    };

    ProtocolFsm fsm;
    fsm.states = {S::Idle,         S::Request,       S::AwaitResponse, S::Response,
                  S::DoneBlocking, S::DoneCompleted, S::DoneEndResp};
    fsm.edges = {
        {S::Idle, SignatureElem::bt(), S::DoneBlocking},
        // request phase, initiator side
        {S::Idle, nb(fw, P::BeginReq, K::Accepted), S::Request},
        {S::Idle, nb(fw, P::BeginReq, K::Updated, P::EndReq), S::AwaitResponse},
        {S::Idle, nb(fw, P::BeginReq, K::Updated, P::BeginResp), S::Response},
        {S::Idle, nb(fw, P::BeginReq, K::Completed), S::DoneCompleted},
        // target ends the request on the backward path
        {S::Request, nb(bw, P::EndReq, K::Accepted), S::AwaitResponse},
        {S::Request, nb(bw, P::EndReq, K::Completed), S::DoneCompleted},
        // BEGIN_RESP without END_REQ implies END_REQ
        {S::Request, nb(bw, P::BeginResp, K::Accepted), S::Response},
        {S::Request, nb(bw, P::BeginResp, K::Updated, P::EndResp), S::DoneEndResp},
        {S::Request, nb(bw, P::BeginResp, K::Completed), S::DoneCompleted},
        // response phase
        {S::AwaitResponse, nb(bw, P::BeginResp, K::Accepted), S::Response},
        {S::AwaitResponse, nb(bw, P::BeginResp, K::Updated, P::EndResp), S::DoneEndResp},
        {S::AwaitResponse, nb(bw, P::BeginResp, K::Completed), S::DoneCompleted},
        {S::Response, nb(fw, P::EndResp, K::Completed), S::DoneEndResp},
    };
    return fsm;
}

void enumerate_from(const ProtocolFsm& fsm, ProtocolState s, std::vector<SignatureElem>& path,
                    std::vector<TypeSignature>& out) {
    if (is_accepting(s)) {
        out.push_back({path});
        return;
    }
    for (const auto& e : fsm.edges) {
        if (e.from != s)
            continue;
        path.push_back(e.elem);
        enumerate_from(fsm, e.to, path, out);
        path.pop_back();
    }
}

struct ReferenceIndex {
    std::vector<TransactionType> types;
    std::map<std::string, int> by_text;
};

const ReferenceIndex& reference_index() {
    static const ReferenceIndex idx = [] {
        ReferenceIndex r;
        r.types = enumerate_base_protocol_types();
        for (const auto& t : r.types)
            r.by_text.emplace(t.signature.text(), t.id);
        return r;
    }();
    return idx;
}

} // namespace

SignatureElem SignatureElem::nb(Direction d, PhaseKind in, SyncKind st,
                                std::optional<PhaseKind> out) {
    SignatureElem e;
    e.blocking = false;
    e.dir = d;
    e.phase_in = Phase{in, 0};
    e.status = SyncStatus{st, 0};
    if (out)
        e.phase_out = Phase{*out, 0};
    return e;
}

std::string SignatureElem::text() const {
    if (blocking)
        return "bt";
    std::string s = dir == Direction::Fw ? "fw:" : "bw:";
    s += to_string(phase_in);
    s += '/';
    s += status_text(status);
    if (phase_out) {
        s += '>';
        s += to_string(*phase_out);
    }
    return s;
}

std::string TypeSignature::text() const {
    std::string s;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (i)
            s += ';';
        s += elems[i].text();
    }
    return s;
}

std::optional<TypeSignature> parse_signature(std::string_view text) {
    TypeSignature sig;
    if (text.empty())
        return std::nullopt;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find(';', pos);
        if (end == std::string_view::npos)
            end = text.size();
        auto tok = text.substr(pos, end - pos);
        pos = end + 1;

        if (tok == "bt") {
            sig.elems.push_back(SignatureElem::bt());
        } else {
            SignatureElem e;
            if (tok.starts_with("fw:"))
                e.dir = Direction::Fw;
            else if (tok.starts_with("bw:"))
                e.dir = Direction::Bw;
            else
                return std::nullopt;
            tok.remove_prefix(3);
            auto slash = tok.find('/');
            if (slash == std::string_view::npos)
                return std::nullopt;
            auto ph = parse_phase(tok.substr(0, slash));
            if (!ph)
                return std::nullopt;
            e.phase_in = *ph;
            auto rest = tok.substr(slash + 1);
            auto gt = rest.find('>');
            auto st = parse_status_text(gt == std::string_view::npos ? rest : rest.substr(0, gt));
            if (!st)
                return std::nullopt;
            e.status = *st;
            if (gt != std::string_view::npos) {
                auto out = parse_phase(rest.substr(gt + 1));
                if (!out || st->kind != SyncKind::Updated)
                    return std::nullopt;
                e.phase_out = *out;
            } else if (st->kind == SyncKind::Updated) {
                return std::nullopt;
            }
            sig.elems.push_back(e);
        }
        if (end == text.size())
            break;
    }
    return sig;
}

std::string_view to_string(TimingModel m) {
    return m == TimingModel::LT ? "LT" : "AT";
}

std::string_view to_string(ProtocolState s) {
    switch (s) {
    case ProtocolState::Idle: return "IDLE";
    case ProtocolState::Request: return "REQUEST";
    case ProtocolState::AwaitResponse: return "AWAIT_RESPONSE";
    case ProtocolState::Response: return "RESPONSE";
    case ProtocolState::DoneBlocking: return "DONE_BLOCKING";
    case ProtocolState::DoneCompleted: return "DONE_COMPLETED";
    case ProtocolState::DoneEndResp: return "DONE_END_RESP";
    }
    return "?";
}

std::optional<ProtocolState> ProtocolFsm::step(ProtocolState s, const SignatureElem& e) const {
    for (const auto& edge : edges)
        if (edge.from == s && edge.elem == e)
            return edge.to;
    return std::nullopt;
}

std::vector<SignatureElem> ProtocolFsm::outgoing(ProtocolState s) const {
    std::vector<SignatureElem> out;
    for (const auto& edge : edges)
        if (edge.from == s)
            out.push_back(edge.elem);
    return out;
}

const ProtocolFsm& base_protocol_fsm() {
    static const ProtocolFsm fsm = make_fsm();
    return fsm;
}

FsmWalk walk(const ProtocolFsm& fsm, std::span<const SignatureElem> elems) {
    FsmWalk w{0, fsm.initial};
    for (const auto& e : elems) {
        auto next = fsm.step(w.state, e);
        if (!next)
            break;
        w.state = *next;
        ++w.accepted;
    }
    return w;
}

std::vector<TransactionType> enumerate_base_protocol_types() {
    const auto& fsm = base_protocol_fsm();
    std::vector<TypeSignature> sigs;
    std::vector<SignatureElem> path;
    enumerate_from(fsm, fsm.initial, path, sigs);

    std::vector<TransactionType> types;
    for (std::size_t i = 0; i < sigs.size(); ++i) {
        bool lt = std::any_of(sigs[i].elems.begin(), sigs[i].elems.end(),
                              [](const SignatureElem& e) { return e.blocking; });
        types.push_back({static_cast<int>(i + 1), sigs[i], lt ? TimingModel::LT : TimingModel::AT});
    }
    if (types.size() != 13)
        throw std::logic_error("base-protocol FSM enumerates " + std::to_string(types.size()) +
                               " transaction types, expected 13");
    return types;
}

const std::vector<TransactionType>& reference_types() {
    return reference_index().types;
}

const TransactionType* find_type(int id) {
    const auto& types = reference_types();
    if (id < 1 || id > static_cast<int>(types.size()))
        return nullptr;
    return &types[static_cast<std::size_t>(id - 1)];
}

TypeSignature signature_of(const TransactionLifetime& tl) {
    TypeSignature sig;
    for (const Sequence* s : initiator_level(tl)) {
        if (!is_nb(s->interface)) {
            sig.elems.push_back(SignatureElem::bt());
            continue;
        }
        auto missing = [&](const char* what) {
            throw Error(ErrorCode::MissingField,
                        "tx " + std::to_string(tl.tx_id) + " sequence " +
                            std::to_string(s->index) + " lacks " + what);
        };
        if (!s->phase_at_call)
            missing("a phase at call");
        if (!s->status)
            missing("a return status");

        SignatureElem e;
        e.dir = s->interface == Interface::NbTransportFw ? Direction::Fw : Direction::Bw;
        e.phase_in = *s->phase_at_call;
        e.status = *s->status;
        if (e.status.kind == SyncKind::Updated) {
            if (!s->phase_at_return)
                missing("a phase at return");
            e.phase_out = *s->phase_at_return;
        }
        if (e.phase_in.kind == PhaseKind::EndResp && e.status.kind == SyncKind::Accepted)
            e.status = SyncStatus{SyncKind::Completed, 0};
        sig.elems.push_back(e);
    }
    return sig;
}

Classification classify_signature(const TypeSignature& sig) {
    const auto& idx = reference_index();
    if (auto it = idx.by_text.find(sig.text()); it != idx.by_text.end())
        return ClassifiedOk{it->second};

    // Longest common prefix with any reference signature.
    std::size_t best = 0;
    for (const auto& t : idx.types) {
        const auto& ref = t.signature.elems;
        std::size_t k = 0;
        while (k < ref.size() && k < sig.elems.size() && ref[k] == sig.elems[k])
            ++k;
        best = std::max(best, k);
    }
    std::set<std::string> next;
    for (const auto& t : idx.types) {
        const auto& ref = t.signature.elems;
        if (ref.size() <= best)
            continue;
        if (std::equal(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(best),
                       sig.elems.begin()))
            next.insert(ref[best].text());
    }
    TypeViolation v;
    v.first_faulty_index = best + 1;
    v.first_faulty_sequence = best + 1;
    v.expected_next.assign(next.begin(), next.end());
    return v;
}

Classification classify(const TransactionLifetime& tl) {
    auto c = classify_signature(signature_of(tl));
    if (auto* v = std::get_if<TypeViolation>(&c)) {
        auto level = initiator_level(tl);
        v->first_faulty_sequence = v->first_faulty_index <= level.size()
                                       ? level[v->first_faulty_index - 1]->index
                                       : tl.n_t() + 1;
    }
    return c;
}

} // namespace vpcheck
