#include "vpcheck/trace_ingest.hpp"

#include "vpcheck/error.hpp"
#include "vpcheck/trace_model.hpp"

#include <json.hpp>
#include <zlib.h>

#include <fstream>
#include <set>
#include <sstream>

namespace vpcheck {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void syntax(std::uint64_t line, const std::string& reason) {
    throw Error(ErrorCode::SyntaxError, reason, line);
}

const json& field(const json& obj, const char* key, std::uint64_t line) {
    auto it = obj.find(key);
    if (it == obj.end())
        syntax(line, std::string("missing field \"") + key + "\"");
    return *it;
}

const std::string& string_field(const json& obj, const char* key, std::uint64_t line) {
    const auto& v = field(obj, key, line);
    if (!v.is_string())
        syntax(line, std::string("field \"") + key + "\" must be a string");
    return v.get_ref<const std::string&>();
}

std::uint64_t uint_field(const json& obj, const char* key, std::uint64_t line) {
    const auto& v = field(obj, key, line);
    if (!v.is_number_unsigned())
        syntax(line, std::string("field \"") + key + "\" must be a non-negative integer");
    return v.get<std::uint64_t>();
}

template <typename T, typename Parser>
T enum_field(const json& obj, const char* key, std::uint64_t line, Parser parse) {
    const auto& s = string_field(obj, key, line);
    auto v = parse(s);
    if (!v)
        throw Error(ErrorCode::UnknownEnum,
                    std::string("field \"") + key + "\" has unknown value \"" + s + "\"", line);
    return *v;
}

json parse_line(std::string_view text, std::uint64_t line) {
    try {
        auto j = json::parse(text);
        if (!j.is_object())
            syntax(line, "record is not an object");
        return j;
    } catch (const json::parse_error& e) {
        syntax(line, e.what());
    }
}

TraceHeader parse_header(const json& j, std::uint64_t line) {
    static const std::set<std::string> keys = {"format", "design", "modules"};
    for (const auto& [k, v] : j.items())
        if (!keys.count(k))
            syntax(line, "unexpected header key \"" + k + "\"");

    TraceHeader h;
    h.format_version = string_field(j, "format", line);
    if (h.format_version != kTraceFormat)
        throw Error(ErrorCode::VersionMismatch,
                    "expected \"" + std::string(kTraceFormat) + "\", got \"" + h.format_version +
                        "\"",
                    line);
    h.design_name = string_field(j, "design", line);
    const auto& mods = field(j, "modules", line);
    if (!mods.is_array())
        syntax(line, "\"modules\" must be an array");
    std::set<std::string> seen;
    for (const auto& m : mods) {
        if (!m.is_object())
            syntax(line, "module entry is not an object");
        ModuleRef ref;
        ref.instance_path = string_field(m, "path", line);
        ref.root_name = string_field(m, "root", line);
        ref.role = enum_field<Role>(m, "role", line, parse_role);
        if (ref.instance_path.empty() || ref.root_name.empty())
            syntax(line, "module path and root must be non-empty");
        if (!seen.insert(ref.instance_path).second)
            syntax(line, "duplicate module path \"" + ref.instance_path + "\"");
        h.modules.push_back(std::move(ref));
    }
    return h;
}

TraceEvent parse_event(const json& j, const TraceHeader& h, std::uint64_t line,
                       std::uint64_t seq_no) {
    static const std::set<std::string> keys = {"kind",   "if",     "t",   "tx",   "caller",
                                               "callee", "phase",  "delay", "status", "cmd",
                                               "addr",   "len",    "data", "resp"};
    for (const auto& [k, v] : j.items())
        if (!keys.count(k))
            syntax(line, "unexpected event key \"" + k + "\"");

    TraceEvent ev;
    ev.seq_no = seq_no;
    ev.kind = enum_field<EventKind>(j, "kind", line, parse_event_kind);
    ev.interface = enum_field<Interface>(j, "if", line, parse_interface);
    ev.time = SimTime(uint_field(j, "t", line));
    ev.tx_id = uint_field(j, "tx", line);

    auto module = [&](const char* key) {
        const auto& path = string_field(j, key, line);
        const auto* ref = h.find(path);
        if (!ref)
            throw Error(ErrorCode::UnknownModule, "module \"" + path + "\" not in header", line);
        return *ref;
    };
    ev.caller = module("caller");
    ev.callee = module("callee");

    bool nb = is_nb(ev.interface);
    if (j.contains("phase")) {
        if (!nb)
            syntax(line, "\"phase\" is only allowed on nb_transport events");
        ev.phase = enum_field<Phase>(j, "phase", line, parse_phase);
    } else if (nb) {
        syntax(line, "missing field \"phase\"");
    }

    ev.delay = SimTime(uint_field(j, "delay", line));

    bool wants_status = nb && ev.kind == EventKind::Return;
    if (j.contains("status")) {
        if (!wants_status)
            syntax(line, "\"status\" is only allowed on nb_transport returns");
        ev.return_status = enum_field<SyncStatus>(j, "status", line, parse_sync);
    } else if (wants_status) {
        syntax(line, "missing field \"status\"");
    }

    ev.attrs.command = enum_field<Command>(j, "cmd", line, parse_command);
    const auto& addr = string_field(j, "addr", line);
    auto a = parse_address(addr);
    if (!a)
        syntax(line, "bad address \"" + addr + "\"");
    ev.attrs.address = *a;
    ev.attrs.data_length = uint_field(j, "len", line);
    const auto& data = string_field(j, "data", line);
    auto bytes = from_hex(data);
    if (!bytes)
        syntax(line, "bad hex data");
    ev.attrs.data = std::move(*bytes);
    ev.attrs.response_status = enum_field<ResponseStatus>(j, "resp", line, parse_response);
    return ev;
}

} // namespace

const ModuleRef* TraceHeader::find(std::string_view instance_path) const {
    for (const auto& m : modules)
        if (m.instance_path == instance_path)
            return &m;
    return nullptr;
}

Trace parse_trace(std::string_view text) {
    Trace trace;
    bool have_header = false;
    std::uint64_t line = 0;
    std::uint64_t seq_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        auto record = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line;
        if (!record.empty() && record.back() == '\r')
            record.remove_suffix(1);
        if (record.find_first_not_of(" \t") == std::string_view::npos)
            continue;
        auto j = parse_line(record, line);
        if (!have_header) {
            trace.header = parse_header(j, line);
            have_header = true;
            continue;
        }
        trace.events.push_back(parse_event(j, trace.header, line, ++seq_no));
    }
    if (!have_header)
        syntax(line == 0 ? 1 : line, "missing header record");
    return trace;
}

std::string read_file_bytes(const std::filesystem::path& path) {
    auto name = path.string();
    if (name.size() >= 3 && name.ends_with(".gz")) {
        gzFile f = gzopen(name.c_str(), "rb");
        if (!f)
            throw Error(ErrorCode::IoError, "cannot open " + name);
        std::string out;
        char buf[1 << 16];
        int n = 0;
        while ((n = gzread(f, buf, sizeof(buf))) > 0)
            out.append(buf, static_cast<std::size_t>(n));
        int err = 0;
        const char* msg = gzerror(f, &err);
        gzclose(f);
        if (n < 0 || (err != Z_OK && err != Z_STREAM_END))
            throw Error(ErrorCode::IoError, "gzip error in " + name + ": " + msg);
        return out;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
    auto name = path.string();
    if (name.size() >= 3 && name.ends_with(".gz")) {
        gzFile f = gzopen(name.c_str(), "wb");
        if (!f)
            throw Error(ErrorCode::IoError, "cannot write " + name);
        int n = bytes.empty() ? 0
                              : gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
        gzclose(f);
        if (!bytes.empty() && n <= 0)
            throw Error(ErrorCode::IoError, "gzip write failed for " + name);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + name);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(ErrorCode::IoError, "write failed for " + name);
}

Trace read_trace_file(const std::filesystem::path& path) {
    return parse_trace(read_file_bytes(path));
}

std::string serialize_header(const TraceHeader& header) {
    ordered_json j;
    j["format"] = header.format_version;
    j["design"] = header.design_name;
    j["modules"] = ordered_json::array();
    for (const auto& m : header.modules) {
        ordered_json e;
        e["path"] = m.instance_path;
        e["root"] = m.root_name;
        e["role"] = to_string(m.role);
        j["modules"].push_back(std::move(e));
    }
    return j.dump();
}

std::string serialize_event(const TraceEvent& ev) {
    ordered_json j;
    j["kind"] = to_string(ev.kind);
    j["if"] = to_string(ev.interface);
    j["t"] = ev.time.ps;
    j["tx"] = ev.tx_id;
    j["caller"] = ev.caller.instance_path;
    j["callee"] = ev.callee.instance_path;
    if (ev.phase)
        j["phase"] = to_string(*ev.phase);
    j["delay"] = ev.delay.ps;
    if (ev.return_status)
        j["status"] = to_string(*ev.return_status);
    j["cmd"] = to_string(ev.attrs.command);
    j["addr"] = format_address(ev.attrs.address);
    j["len"] = ev.attrs.data_length;
    j["data"] = to_hex(ev.attrs.data);
    j["resp"] = to_string(ev.attrs.response_status);
    return j.dump();
}

std::string serialize_trace(const Trace& trace) {
    std::string out = serialize_header(trace.header);
    out.push_back('\n');
    for (const auto& ev : trace.events) {
        out += serialize_event(ev);
        out.push_back('\n');
    }
    return out;
}

void write_trace_file(const std::filesystem::path& path, const Trace& trace) {
    write_file_bytes(path, serialize_trace(trace));
}

void validate_stream(std::span<const TraceEvent> events) {
    SimTime last;
    for (const auto& ev : events) {
        if (ev.time < last)
            throw Error(ErrorCode::TimeRegression,
                        "time " + std::to_string(ev.time.ps) + " ps precedes " +
                            std::to_string(last.ps) + " ps",
                        ev.seq_no);
        last = ev.time;

        auto mismatch = [&](const std::string& why) {
            throw Error(ErrorCode::RoleMismatch, why, ev.seq_no);
        };
        if (ev.caller.instance_path == ev.callee.instance_path)
            mismatch(ev.caller.instance_path + " calls itself");

        Role caller = ev.caller.role;
        Role callee = ev.callee.role;
        if (ev.interface == Interface::NbTransportBw) {
            if (caller == Role::Initiator)
                mismatch("nb_transport_bw called by initiator " + ev.caller.instance_path);
            if (callee == Role::Target)
                mismatch("nb_transport_bw called on target " + ev.callee.instance_path);
        } else {
            if (caller == Role::Target)
                mismatch(std::string(to_string(ev.interface)) + " called by target " +
                         ev.caller.instance_path);
            if (callee == Role::Initiator)
                mismatch(std::string(to_string(ev.interface)) + " called on initiator " +
                         ev.callee.instance_path);
        }
    }
    (void)build_lifetimes(events);
}

} // namespace vpcheck
