#include "vpcheck/synth_vp.hpp"

#include "vpcheck/base_protocol.hpp"
#include "vpcheck/error.hpp"
#include "vpcheck/trace_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <set>
#include <tuple>

namespace vpcheck {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// --- Rng -------------------------------------------------------------------

std::uint64_t Rng::below(std::uint64_t n) {
    if (n <= 1)
        return 0;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n; // largest multiple of n, minus one
    std::uint64_t x = 0;
    do {
        x = next();
    } while (x > limit);
    return x % n;
}

std::uint64_t Rng::between(std::uint64_t lo, std::uint64_t hi) {
    if (hi <= lo)
        return lo;
    if (hi - lo == std::numeric_limits<std::uint64_t>::max())
        return next();
    return lo + below(hi - lo + 1);
}

double Rng::unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t Rng::weighted(const std::vector<double>& weights) {
    double total = 0;
    for (double w : weights)
        total += w;
    double x = unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0)
            continue;
        if (x < weights[i])
            return i;
        x -= weights[i];
    }
    for (std::size_t i = weights.size(); i > 0; --i)
        if (weights[i - 1] > 0)
            return i - 1;
    return 0;
}

// --- topology ----------------------------------------------------------------

namespace {

[[noreturn]] void config_error(const std::string& why) {
    throw Error(ErrorCode::ConfigError, why);
}

std::string root_of(const std::string& path) {
    return path.substr(0, path.find('.'));
}

} // namespace

std::vector<ModuleRef> Topology::modules() const {
    std::vector<ModuleRef> out;
    for (const auto& i : initiators)
        out.push_back({root_of(i), i, Role::Initiator});
    if (interconnect)
        out.push_back({root_of(*interconnect), *interconnect, Role::Interconnect});
    for (const auto& t : targets)
        out.push_back({root_of(t.path), t.path, Role::Target});
    return out;
}

const TargetConfig* Topology::target_for(std::uint64_t address) const {
    for (const auto& t : targets)
        if (t.range.contains(address))
            return &t;
    return nullptr;
}

std::uint64_t Topology::path_latency(const TargetConfig& t) const {
    return (interconnect ? interconnect_delay_ps : 0) + t.latency_ps;
}

std::vector<int> Workload::active_types() const {
    std::vector<int> out;
    for (const auto& [id, w] : tt_mix)
        if (w > 0)
            out.push_back(id);
    return out;
}

void validate_config(const GenConfig& cfg) {
    const auto& topo = cfg.topology;
    const auto& wl = cfg.workload;
    if (topo.initiators.empty())
        config_error("topology has no initiators");
    if (topo.targets.empty())
        config_error("topology has no targets");

    std::set<std::string> paths;
    for (const auto& m : topo.modules()) {
        if (m.instance_path.empty())
            config_error("empty module path");
        if (!paths.insert(m.instance_path).second)
            config_error("duplicate module path " + m.instance_path);
    }
    for (std::size_t i = 0; i < topo.targets.size(); ++i) {
        const auto& a = topo.targets[i].range;
        if (a.lo > a.hi)
            config_error("target " + topo.targets[i].path + " has an empty range");
        for (std::size_t j = i + 1; j < topo.targets.size(); ++j) {
            const auto& b = topo.targets[j].range;
            if (a.lo <= b.hi && b.lo <= a.hi)
                config_error("memory map ranges of " + topo.targets[i].path + " and " +
                             topo.targets[j].path + " overlap");
        }
    }

    if (wl.tt_mix.empty())
        config_error("workload tt_mix is empty");
    bool positive = false;
    for (const auto& [id, w] : wl.tt_mix) {
        if (!find_type(id))
            config_error("unknown transaction type " + std::to_string(id));
        if (w < 0)
            config_error("negative tt_mix weight");
        positive |= w > 0;
    }
    if (!positive)
        config_error("tt_mix has no positive weight");

    if (wl.cmd_mix.empty())
        config_error("workload cmd_mix is empty");
    positive = false;
    for (const auto& [name, w] : wl.cmd_mix) {
        auto c = parse_command(name);
        if (!c || c->kind == CommandKind::Invalid)
            config_error("unknown command " + name);
        if (w < 0)
            config_error("negative cmd_mix weight");
        positive |= w > 0;
    }
    if (!positive)
        config_error("cmd_mix has no positive weight");

    if (wl.data_lengths.empty())
        config_error("no data lengths");
    for (auto len : wl.data_lengths) {
        if (len == 0)
            config_error("data length must be positive");
        for (const auto& t : topo.targets)
            if (t.range.hi - t.range.lo < len - 1)
                config_error("target " + t.path + " is smaller than data length " +
                             std::to_string(len));
    }
}

// --- config files ------------------------------------------------------------

namespace {

template <typename F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, e.what());
    }
}

AddressRange parse_range_json(const json& r) {
    if (!r.is_array() || r.size() != 2)
        config_error("range must be [\"0x..\", \"0x..\"]");
    auto lo = parse_address(r.at(0).get<std::string>());
    auto hi = parse_address(r.at(1).get<std::string>());
    if (!lo || !hi)
        config_error("bad hex address in range");
    return {*lo, *hi};
}

std::vector<TargetConfig> parse_targets(const json& arr) {
    std::vector<TargetConfig> out;
    for (const auto& t : arr) {
        TargetConfig tc;
        tc.path = t.at("path").get<std::string>();
        tc.range = parse_range_json(t.at("range"));
        tc.latency_ps = t.value("latency_ps", std::uint64_t{10000});
        out.push_back(std::move(tc));
    }
    return out;
}

ordered_json targets_json(const std::vector<TargetConfig>& targets) {
    auto arr = ordered_json::array();
    for (const auto& t : targets) {
        ordered_json j;
        j["path"] = t.path;
        j["range"] = {format_address(t.range.lo), format_address(t.range.hi)};
        j["latency_ps"] = t.latency_ps;
        arr.push_back(std::move(j));
    }
    return arr;
}

} // namespace

GenConfig parse_gen_config(std::string_view text) {
    return guarded([&] {
        auto j = json::parse(text);
        GenConfig cfg;
        cfg.design = j.value("design", cfg.design);
        cfg.topology.initiators = j.at("initiators").get<std::vector<std::string>>();
        if (j.contains("interconnect") && !j["interconnect"].is_null())
            cfg.topology.interconnect = j["interconnect"].get<std::string>();
        cfg.topology.interconnect_delay_ps = j.value("interconnect_delay_ps", std::uint64_t{0});
        cfg.topology.targets = parse_targets(j.at("targets"));

        const auto& w = j.at("workload");
        auto& wl = cfg.workload;
        wl.n_transactions = w.at("n_transactions").get<std::uint64_t>();
        for (const auto& [k, v] : w.at("tt_mix").items()) {
            std::size_t used = 0;
            int id = std::stoi(k, &used);
            if (used != k.size())
                config_error("tt_mix key \"" + k + "\" is not a type id");
            wl.tt_mix[id] = v.get<double>();
        }
        for (const auto& [k, v] : w.at("cmd_mix").items())
            wl.cmd_mix[k] = v.get<double>();
        if (w.contains("data_lengths"))
            wl.data_lengths = w["data_lengths"].get<std::vector<std::uint64_t>>();
        wl.gap_ps = w.value("gap_ps", wl.gap_ps);
        wl.jitter = w.value("jitter", wl.jitter);
        wl.seed = w.value("seed", wl.seed);
        validate_config(cfg);
        return cfg;
    });
}

GenConfig read_gen_config(const std::filesystem::path& path) {
    return parse_gen_config(read_file_bytes(path));
}

std::string serialize_gen_config(const GenConfig& cfg) {
    ordered_json j;
    j["design"] = cfg.design;
    j["initiators"] = cfg.topology.initiators;
    if (cfg.topology.interconnect)
        j["interconnect"] = *cfg.topology.interconnect;
    else
        j["interconnect"] = nullptr;
    j["interconnect_delay_ps"] = cfg.topology.interconnect_delay_ps;
    j["targets"] = targets_json(cfg.topology.targets);
    ordered_json w;
    w["n_transactions"] = cfg.workload.n_transactions;
    w["tt_mix"] = ordered_json::object();
    for (const auto& [id, wt] : cfg.workload.tt_mix)
        w["tt_mix"][std::to_string(id)] = wt;
    w["cmd_mix"] = ordered_json::object();
    for (const auto& [c, wt] : cfg.workload.cmd_mix)
        w["cmd_mix"][c] = wt;
    w["data_lengths"] = cfg.workload.data_lengths;
    w["gap_ps"] = cfg.workload.gap_ps;
    w["jitter"] = cfg.workload.jitter;
    w["seed"] = cfg.workload.seed;
    j["workload"] = std::move(w);
    return j.dump(2) + "\n";
}

// --- generation ----------------------------------------------------------------

namespace {

struct Planned {
    SimTime time;
    std::uint64_t tx;
    std::uint32_t order;
    TraceEvent ev;
};

struct TxPlan {
    std::uint64_t id;
    const ModuleRef* initiator;
    const TargetConfig* target;
    const ModuleRef* target_ref;
    int type;
    Command cmd;
    std::uint64_t address;
    std::uint64_t len;
    std::vector<std::uint8_t> write_data;
    std::vector<std::uint8_t> read_data;
    std::uint64_t td;
};

class TxRenderer {
public:
    TxRenderer(const TxPlan& plan, const ModuleRef* ic, std::vector<Planned>& out):
        p_(plan), ic_(ic), out_(out) {}

    // Attribute snapshot on the initiator side (global address) or the
    // target side (local offset).
    TxAttributes attrs(bool target_side, bool responded) const {
        TxAttributes a;
        a.command = p_.cmd;
        a.address = target_side && ic_ ? p_.address - p_.target->range.lo : p_.address;
        a.data_length = p_.len;
        if (p_.cmd.kind == CommandKind::Write)
            a.data = p_.write_data;
        else if (p_.cmd.kind == CommandKind::Read && responded)
            a.data = p_.read_data;
        else
            a.data.assign(p_.len, 0);
        a.response_status = responded ? ResponseStatus{ResponseKind::Ok, 0} : ResponseStatus{};
        return a;
    }

    void emit(SimTime t, EventKind kind, Interface itf, const ModuleRef& caller,
              const ModuleRef& callee, std::optional<Phase> phase, SimTime delay,
              TxAttributes a, std::optional<SyncStatus> st) {
        TraceEvent ev;
        ev.time = t;
        ev.kind = kind;
        ev.interface = itf;
        ev.caller = caller;
        ev.callee = callee;
        ev.tx_id = p_.id;
        ev.phase = phase;
        ev.delay = delay;
        ev.attrs = std::move(a);
        ev.return_status = st;
        out_.push_back({t, p_.id, order_++, std::move(ev)});
    }

    // Blocking transport. `wait_style` moves the target latency into
    // simulated time instead of the timing annotation.
    SimTime blocking(SimTime t0, std::uint64_t ic_delay, bool wait_style) {
        const auto& im = *p_.initiator;
        const auto& tm = *p_.target_ref;
        std::uint64_t ic_part = ic_ ? std::min(ic_delay, p_.td) : 0;
        SimTime t_ret = wait_style ? t0 + SimTime(p_.td) : t0;
        SimTime d_ret = wait_style ? SimTime(0) : SimTime(p_.td);
        auto bt = Interface::BTransport;
        if (ic_) {
            emit(t0, EventKind::Call, bt, im, *ic_, {}, SimTime(0), attrs(false, false), {});
            emit(t0, EventKind::Call, bt, *ic_, tm, {}, SimTime(ic_part), attrs(true, false),
                 {});
            emit(t_ret, EventKind::Return, bt, *ic_, tm, {}, d_ret, attrs(true, true), {});
            emit(t_ret, EventKind::Return, bt, im, *ic_, {}, d_ret, attrs(false, true), {});
        } else {
            emit(t0, EventKind::Call, bt, im, tm, {}, SimTime(0), attrs(false, false), {});
            emit(t_ret, EventKind::Return, bt, im, tm, {}, d_ret, attrs(false, true), {});
        }
        return t_ret + d_ret;
    }

    SimTime non_blocking(SimTime t0, const TypeSignature& sig) {
        const auto& elems = sig.elems;
        const std::size_t k = elems.size();
        std::uint64_t elapsed = k > 1 ? p_.td : 0;
        std::uint64_t annotation = p_.td - elapsed;
        std::uint64_t step = k > 1 ? elapsed / (k - 1) : 0;

        bool responded = false;
        SimTime t = t0;
        for (std::size_t i = 0; i < k; ++i) {
            if (i > 0)
                t = i + 1 == k ? t0 + SimTime(elapsed) : t + SimTime(step);
            const auto& e = elems[i];
            bool fw = e.dir == Direction::Fw;
            bool last = i + 1 == k;

            // Target-side response points.
            if (!fw && e.phase_in.kind == PhaseKind::BeginResp)
                responded = true;
            bool respond_on_return =
                fw && e.phase_in.kind == PhaseKind::BeginReq &&
                (e.status.kind == SyncKind::Completed ||
                 (e.phase_out && e.phase_out->kind == PhaseKind::BeginResp));
            bool after = responded || respond_on_return;

            Phase ph_ret = e.phase_out ? *e.phase_out : e.phase_in;
            SimTime d_ret(last ? annotation : 0);
            auto itf = fw ? Interface::NbTransportFw : Interface::NbTransportBw;
            const ModuleRef& caller = fw ? *p_.initiator : *p_.target_ref;
            const ModuleRef& callee = fw ? *p_.target_ref : *p_.initiator;
            bool caller_target_side = !fw;

            if (ic_) {
                emit(t, EventKind::Call, itf, caller, *ic_, e.phase_in, SimTime(0),
                     attrs(caller_target_side, responded), {});
                emit(t, EventKind::Call, itf, *ic_, callee, e.phase_in, SimTime(0),
                     attrs(!caller_target_side, responded), {});
                emit(t, EventKind::Return, itf, *ic_, callee, ph_ret, d_ret,
                     attrs(!caller_target_side, after), e.status);
                emit(t, EventKind::Return, itf, caller, *ic_, ph_ret, d_ret,
                     attrs(caller_target_side, after), e.status);
            } else {
                emit(t, EventKind::Call, itf, caller, callee, e.phase_in, SimTime(0),
                     attrs(false, responded), {});
                emit(t, EventKind::Return, itf, caller, callee, ph_ret, d_ret, attrs(false, after),
                     e.status);
            }
            responded = after;
        }
        return t + SimTime(annotation);
    }

private:
    const TxPlan& p_;
    const ModuleRef* ic_;
    std::vector<Planned>& out_;
    std::uint32_t order_ = 0;
};

std::vector<std::uint8_t> random_bytes(Rng& rng, std::uint64_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v)
        b = static_cast<std::uint8_t>(rng.below(256));
    return v;
}

} // namespace

Trace generate_trace(const GenConfig& cfg) {
    validate_config(cfg);
    const auto& topo = cfg.topology;
    const auto& wl = cfg.workload;
    Rng rng(wl.seed);

    Trace trace;
    trace.header.design_name = cfg.design;
    trace.header.modules = topo.modules();
    const auto& mods = trace.header.modules;
    const ModuleRef* ic = topo.interconnect ? trace.header.find(*topo.interconnect) : nullptr;

    // Type schedule: every active type once (when there is room), the rest
    // drawn by weight, then shuffled.
    auto active = wl.active_types();
    std::vector<int> types;
    if (wl.n_transactions >= active.size())
        types = active;
    std::vector<int> ids;
    std::vector<double> weights;
    for (const auto& [id, w] : wl.tt_mix) {
        ids.push_back(id);
        weights.push_back(w);
    }
    while (types.size() < wl.n_transactions)
        types.push_back(ids[rng.weighted(weights)]);
    rng.shuffle(types);

    std::vector<Command> cmds;
    std::vector<double> cmd_weights;
    for (const auto& [name, w] : wl.cmd_mix) {
        cmds.push_back(*parse_command(name));
        cmd_weights.push_back(w);
    }

    std::vector<SimTime> free_at(topo.initiators.size());
    std::vector<Planned> planned;
    for (std::uint64_t i = 0; i < wl.n_transactions; ++i) {
        TxPlan p;
        p.id = i + 1;
        auto ini = rng.below(topo.initiators.size());
        p.initiator = &mods[ini];
        auto ti = rng.below(topo.targets.size());
        p.target = &topo.targets[ti];
        p.target_ref = trace.header.find(p.target->path);
        p.type = types[i];
        p.cmd = cmds[rng.weighted(cmd_weights)];
        p.len = wl.data_lengths[rng.below(wl.data_lengths.size())];
        std::uint64_t span = p.target->range.hi - p.target->range.lo;
        std::uint64_t slots = (span - (p.len - 1)) / p.len + 1;
        p.address = p.target->range.lo + rng.below(slots) * p.len;
        p.write_data = random_bytes(rng, p.len);
        p.read_data = random_bytes(rng, p.len);
        std::uint64_t latency = topo.path_latency(*p.target);
        p.td = latency - (wl.jitter ? rng.below(latency / 4 + 1) : 0);

        SimTime start = free_at[ini] + SimTime(wl.gap_ps + rng.below(wl.gap_ps + 1));
        TxRenderer r(p, ic, planned);
        const auto& sig = find_type(p.type)->signature;
        SimTime end = sig.elems.front().blocking
                          ? r.blocking(start, topo.interconnect_delay_ps, rng.below(2) == 1)
                          : r.non_blocking(start, sig);
        free_at[ini] = end;
    }

    std::stable_sort(planned.begin(), planned.end(), [](const Planned& a, const Planned& b) {
        return std::tie(a.time, a.tx, a.order) < std::tie(b.time, b.tx, b.order);
    });
    trace.events.reserve(planned.size());
    for (auto& pe : planned) {
        pe.ev.seq_no = trace.events.size() + 1;
        trace.events.push_back(std::move(pe.ev));
    }
    return trace;
}

VpSpec emit_reference_spec(const GenConfig& cfg) {
    validate_config(cfg);
    const auto& topo = cfg.topology;
    auto types = cfg.workload.active_types();
    bool any = cfg.workload.n_transactions > 0;

    VpSpec spec;
    for (const auto& im : topo.initiators) {
        FunctionalSpecEntry e;
        e.im = im;
        if (any)
            for (const auto& t : topo.targets)
                e.allowed.push_back({t.path, t.range, {types.begin(), types.end()}});
        spec.functional.push_back(std::move(e));
    }
    if (any)
        for (const auto& im : topo.initiators)
            for (const auto& t : topo.targets)
                for (int tt : types)
                    spec.timing.push_back({im, t.path, t.range, tt, SimTime(topo.path_latency(t))});
    return spec;
}

// --- fault injection ---------------------------------------------------------

std::string_view to_string(FaultType f) {
    switch (f) {
    case FaultType::FT1: return "FT1";
    case FaultType::FT2: return "FT2";
    case FaultType::FT3: return "FT3";
    }
    return "?";
}

std::string_view to_string(FaultSubKind k) {
    switch (k) {
    case FaultSubKind::RespInit: return "RESP_INIT";
    case FaultSubKind::LenMod: return "LEN_MOD";
    case FaultSubKind::PhaseOrder: return "PHASE_ORDER";
    case FaultSubKind::Addr: return "ADDR";
    case FaultSubKind::MemConfig: return "MEM_CONFIG";
    case FaultSubKind::Delay: return "DELAY";
    }
    return "?";
}

namespace {

FaultType fault_of(FaultSubKind k) {
    switch (k) {
    case FaultSubKind::RespInit:
    case FaultSubKind::LenMod:
    case FaultSubKind::PhaseOrder: return FaultType::FT1;
    case FaultSubKind::Addr:
    case FaultSubKind::MemConfig: return FaultType::FT2;
    case FaultSubKind::Delay: return FaultType::FT3;
    }
    return FaultType::FT1;
}

// Sequences forming each initiator-level element: the outermost call and
// everything nested in it.
std::vector<std::vector<std::size_t>> element_groups(const TransactionLifetime& tl) {
    std::vector<std::vector<std::size_t>> groups;
    for (const Sequence* s : initiator_level(tl)) {
        const Sequence* root = s;
        for (const auto& c : tl.sequences)
            if (c.depth == 0 && c.call_seq_no <= s->call_seq_no &&
                c.return_seq_no >= s->return_seq_no)
                root = &c;
        std::vector<std::size_t> g;
        for (std::size_t i = 0; i < tl.sequences.size(); ++i) {
            const auto& c = tl.sequences[i];
            if (c.call_seq_no >= root->call_seq_no && c.return_seq_no <= root->return_seq_no)
                g.push_back(i);
        }
        std::sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) {
            return tl.sequences[a].call_seq_no < tl.sequences[b].call_seq_no;
        });
        groups.push_back(std::move(g));
    }
    return groups;
}

void swap_content(Sequence& a, Sequence& b) {
    std::swap(a.interface, b.interface);
    std::swap(a.from, b.from);
    std::swap(a.to, b.to);
    std::swap(a.phase_at_call, b.phase_at_call);
    std::swap(a.phase_at_return, b.phase_at_return);
    std::swap(a.status, b.status);
    std::swap(a.attrs_at_call, b.attrs_at_call);
    std::swap(a.attrs_at_return, b.attrs_at_return);
    std::swap(a.delay_at_call, b.delay_at_call);
    std::swap(a.delay_at_return, b.delay_at_return);
}

void reindex(TransactionLifetime& tl) {
    std::sort(tl.sequences.begin(), tl.sequences.end(), [](const Sequence& a, const Sequence& b) {
        return std::tie(a.t_call, a.call_seq_no) < std::tie(b.t_call, b.call_seq_no);
    });
    for (std::size_t i = 0; i < tl.sequences.size(); ++i)
        tl.sequences[i].index = i + 1;
}

bool has_interconnect_hop(const TransactionLifetime& tl) {
    for (const auto& s : tl.sequences)
        if (s.to.role == Role::Interconnect && !nested_children(tl, s).empty())
            return true;
    return false;
}

std::size_t nb_elements(const TransactionLifetime& tl) {
    std::size_t n = 0;
    for (const auto* s : initiator_level(tl))
        n += is_nb(s->interface);
    return n;
}

bool is_reference(const TransactionLifetime& tl) {
    return std::holds_alternative<ClassifiedOk>(classify(tl));
}

// Candidate phase-order mutations of one lifetime: adjacent swaps with the
// same hop structure, and dropping the final element.
std::vector<TransactionLifetime> phase_order_mutants(const TransactionLifetime& tl) {
    std::vector<TransactionLifetime> out;
    auto groups = element_groups(tl);
    for (std::size_t i = 0; i + 1 < groups.size(); ++i) {
        const auto& a = groups[i];
        const auto& b = groups[i + 1];
        if (a.size() != b.size())
            continue;
        auto m = tl;
        for (std::size_t j = 0; j < a.size(); ++j)
            swap_content(m.sequences[a[j]], m.sequences[b[j]]);
        reindex(m);
        if (!is_reference(m))
            out.push_back(std::move(m));
    }
    if (groups.size() >= 2) {
        auto m = tl;
        std::set<std::size_t> drop(groups.back().begin(), groups.back().end());
        std::vector<Sequence> keep;
        for (std::size_t i = 0; i < m.sequences.size(); ++i)
            if (!drop.count(i))
                keep.push_back(m.sequences[i]);
        m.sequences = std::move(keep);
        reindex(m);
        out.push_back(std::move(m));
    }
    return out;
}

bool eligible(const TransactionLifetime& tl, const FaultPlan& plan, std::size_t n_targets) {
    switch (plan.sub_kind) {
    case FaultSubKind::LenMod: return has_interconnect_hop(tl);
    case FaultSubKind::PhaseOrder: return nb_elements(tl) >= 2;
    case FaultSubKind::MemConfig: return n_targets >= 2;
    default: return true;
    }
}

std::uint64_t address_outside(const std::vector<TargetConfig>& map, std::uint64_t len, Rng& rng) {
    std::uint64_t max_hi = 0;
    std::uint64_t min_lo = std::numeric_limits<std::uint64_t>::max();
    for (const auto& t : map) {
        max_hi = std::max(max_hi, t.range.hi);
        min_lo = std::min(min_lo, t.range.lo);
    }
    auto outside = [&](std::uint64_t a) {
        return std::none_of(map.begin(), map.end(),
                            [&](const TargetConfig& t) { return t.range.contains(a); });
    };
    std::uint64_t align = std::max<std::uint64_t>(len, 1);
    constexpr std::uint64_t kSlots = 64;
    if (max_hi <= std::numeric_limits<std::uint64_t>::max() - (kSlots + 2) * align) {
        std::uint64_t base = (max_hi / align + 1) * align;
        auto a = base + rng.below(kSlots) * align;
        if (outside(a))
            return a;
    }
    if (min_lo > 0) {
        auto a = rng.below(min_lo);
        if (outside(a))
            return a;
    }
    config_error("memory map leaves no address outside every range");
}

void mutate(TransactionLifetime& tl, const FaultPlan& plan, const std::vector<ModuleRef>& targets,
            Rng& rng) {
    switch (plan.sub_kind) {
    case FaultSubKind::RespInit: {
        auto groups = element_groups(tl);
        for (auto i : groups.front()) {
            auto& s = tl.sequences[i];
            for (auto* a : {&s.attrs_at_call, &s.attrs_at_return})
                if (a->response_status.kind == ResponseKind::Incomplete)
                    a->response_status = {ResponseKind::Ok, 0};
        }
        break;
    }
    case FaultSubKind::LenMod: {
        for (auto& s : tl.sequences) {
            if (s.to.role != Role::Interconnect)
                continue;
            auto kids = nested_children(tl, s);
            if (kids.empty())
                continue;
            auto& child = const_cast<Sequence&>(*kids.front());
            for (auto* a : {&child.attrs_at_call, &child.attrs_at_return})
                a->data_length = a->data_length * 2 + (a->data_length == 0);
            break;
        }
        break;
    }
    case FaultSubKind::PhaseOrder: {
        auto mutants = phase_order_mutants(tl);
        tl = std::move(mutants[rng.below(mutants.size())]);
        break;
    }
    case FaultSubKind::Addr: {
        const auto& first = tl.sequences.front();
        auto addr = address_outside(plan.memory_map, first.attrs_at_call.data_length, rng);
        const auto im = tl.initiator().instance_path;
        for (auto& s : tl.sequences)
            if (s.from.instance_path == im || s.to.instance_path == im) {
                s.attrs_at_call.address = addr;
                s.attrs_at_return.address = addr;
            }
        break;
    }
    case FaultSubKind::MemConfig: {
        const Sequence* deepest = nullptr;
        for (const auto& s : tl.sequences)
            if (s.to.role == Role::Target && (!deepest || s.depth > deepest->depth))
                deepest = &s;
        auto old = deepest->to;
        std::vector<const ModuleRef*> others;
        for (const auto& t : targets)
            if (t.instance_path != old.instance_path)
                others.push_back(&t);
        const auto& repl = *others[rng.below(others.size())];
        for (auto& s : tl.sequences) {
            if (s.from.instance_path == old.instance_path)
                s.from = repl;
            if (s.to.instance_path == old.instance_path)
                s.to = repl;
        }
        break;
    }
    case FaultSubKind::Delay: {
        auto td = total_delay(tl).ps;
        auto& last = const_cast<Sequence&>(final_sequence(tl));
        last.delay_at_return = last.delay_at_return + SimTime(td + 1 + rng.below(td / 2 + 1));
        break;
    }
    }
}

} // namespace

InjectionResult inject_fault(const Trace& clean, const FaultPlan& plan) {
    if (fault_of(plan.sub_kind) != plan.fault)
        config_error(std::string(to_string(plan.sub_kind)) + " is not a " +
                     std::string(to_string(plan.fault)) + " sub-kind");
    if (plan.sub_kind == FaultSubKind::Addr && plan.memory_map.empty())
        config_error("FT2 ADDR needs the memory map in the fault plan");

    InjectionResult out;
    if (plan.victim_count == 0) {
        out.trace = clean;
        return out;
    }

    validate_stream(clean.events);
    auto lifetimes = build_lifetimes(clean.events);

    std::vector<ModuleRef> targets;
    for (const auto& m : clean.header.modules)
        if (m.role == Role::Target)
            targets.push_back(m);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < lifetimes.size(); ++i)
        if (eligible(lifetimes[i], plan, targets.size()))
            candidates.push_back(i);
    if (candidates.size() < plan.victim_count)
        config_error("only " + std::to_string(candidates.size()) + " of " +
                     std::to_string(lifetimes.size()) + " transactions qualify for " +
                     std::string(to_string(plan.sub_kind)) + ", need " +
                     std::to_string(plan.victim_count));

    Rng rng(plan.seed);
    rng.shuffle(candidates);
    candidates.resize(plan.victim_count);
    std::sort(candidates.begin(), candidates.end());

    std::string label = std::string(to_string(plan.fault)) + "/" +
                        std::string(to_string(plan.sub_kind));
    for (auto i : candidates) {
        mutate(lifetimes[i], plan, targets, rng);
        out.truth.push_back({lifetimes[i].tx_id, label});
    }

    out.trace.header = clean.header;
    out.trace.events = lifetimes_to_events(lifetimes);
    for (std::size_t i = 0; i < out.trace.events.size(); ++i)
        out.trace.events[i].seq_no = i + 1;
    return out;
}

FaultPlan parse_fault_plan(std::string_view text) {
    return guarded([&] {
        auto j = json::parse(text);
        FaultPlan p;
        auto fault = j.at("fault").get<std::string>();
        if (fault == "FT1") p.fault = FaultType::FT1;
        else if (fault == "FT2") p.fault = FaultType::FT2;
        else if (fault == "FT3") p.fault = FaultType::FT3;
        else config_error("unknown fault \"" + fault + "\"");

        std::string sub = j.value("sub_kind", std::string());
        if (sub.empty()) {
            if (p.fault == FaultType::FT1)
                config_error("FT1 needs a sub_kind (RESP_INIT, LEN_MOD or PHASE_ORDER)");
            sub = p.fault == FaultType::FT2 ? "ADDR" : "DELAY";
        }
        bool found = false;
        for (auto k : {FaultSubKind::RespInit, FaultSubKind::LenMod, FaultSubKind::PhaseOrder,
                       FaultSubKind::Addr, FaultSubKind::MemConfig, FaultSubKind::Delay})
            if (to_string(k) == sub) {
                p.sub_kind = k;
                found = true;
            }
        if (!found)
            config_error("unknown sub_kind \"" + sub + "\"");
        p.victim_count = j.at("victims").get<std::uint64_t>();
        p.seed = j.value("seed", p.seed);
        if (j.contains("memory_map"))
            p.memory_map = parse_targets(j["memory_map"]);
        return p;
    });
}

std::string serialize_fault_plan(const FaultPlan& plan) {
    ordered_json j;
    j["fault"] = to_string(plan.fault);
    j["sub_kind"] = to_string(plan.sub_kind);
    j["victims"] = plan.victim_count;
    j["seed"] = plan.seed;
    if (!plan.memory_map.empty())
        j["memory_map"] = targets_json(plan.memory_map);
    return j.dump(2) + "\n";
}

std::string serialize_truth(const std::vector<GroundTruth>& truth) {
    auto arr = ordered_json::array();
    for (const auto& t : truth) {
        ordered_json j;
        j["tx"] = t.tx_id;
        j["fault"] = t.fault;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<GroundTruth> parse_truth(std::string_view text) {
    return guarded([&] {
        std::vector<GroundTruth> out;
        for (const auto& j : json::parse(text))
            out.push_back({j.at("tx").get<std::uint64_t>(), j.at("fault").get<std::string>()});
        return out;
    });
}

// --- replicas --------------------------------------------------------------------

namespace {

std::vector<TargetConfig> memory_bank(std::size_t n, std::uint64_t size, std::uint64_t latency,
                                      std::string_view prefix = "top.memory_") {
    std::vector<TargetConfig> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({std::string(prefix) + std::to_string(i),
                       {i * size, i * size + size - 1},
                       latency + 1000 * i});
    return out;
}

} // namespace

GenConfig routing_replica(std::uint64_t seed) {
    GenConfig c;
    c.design = "routing-model";
    c.topology.initiators = {"top.initiator"};
    c.topology.interconnect = "top.router";
    c.topology.interconnect_delay_ps = 2000;
    c.topology.targets = memory_bank(4, 0x100, 10000);
    c.workload.n_transactions = 10;
    c.workload.tt_mix = {{1, 1.0}};
    c.workload.cmd_mix = {{"READ", 1.0}, {"WRITE", 1.0}};
    c.workload.data_lengths = {4};
    c.workload.seed = seed;
    return c;
}

GenConfig at_replica(std::uint64_t seed) {
    GenConfig c;
    c.design = "at-example";
    c.topology.initiators = {"top.initiator_0", "top.initiator_1"};
    c.topology.interconnect = "top.bus";
    c.topology.interconnect_delay_ps = 5000;
    c.topology.targets = memory_bank(4, 0x400, 40000, "top.target_");
    c.workload.n_transactions = 20;
    for (int id : {2, 3, 4, 6, 7, 8, 9, 11, 12})
        c.workload.tt_mix[id] = 1.0;
    c.workload.cmd_mix = {{"READ", 1.0}, {"WRITE", 1.0}};
    c.workload.data_lengths = {4, 8};
    c.workload.gap_ps = 10000;
    c.workload.seed = seed;
    return c;
}

GenConfig mixed_replica(std::uint64_t seed) {
    GenConfig c;
    c.design = "mixed-soc";
    c.topology.initiators = {"soc.cpu_0", "soc.cpu_1", "soc.dma"};
    c.topology.interconnect = "soc.ahb";
    c.topology.interconnect_delay_ps = 3000;
    c.topology.targets = memory_bank(16, 0x1000, 20000, "soc.slave_");
    c.workload.n_transactions = 200;
    for (int id : {1, 2, 4, 6, 8, 9, 11, 13})
        c.workload.tt_mix[id] = id == 1 ? 4.0 : 1.0;
    c.workload.cmd_mix = {{"READ", 2.0}, {"WRITE", 1.0}};
    c.workload.data_lengths = {4, 8, 16};
    c.workload.seed = seed;
    return c;
}

} // namespace vpcheck
