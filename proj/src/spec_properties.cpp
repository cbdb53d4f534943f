#include "vpcheck/spec_properties.hpp"

#include "vpcheck/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <map>

namespace vpcheck {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& why) {
    throw Error(ErrorCode::SchemaError, where + ": " + why);
}

const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object())
        schema(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        schema(where, std::string("missing \"") + key + "\"");
    return *it;
}

std::string path_member(const json& obj, const char* key, const std::string& where,
                        const TraceHeader* header) {
    const auto& v = member(obj, key, where);
    if (!v.is_string() || v.get_ref<const std::string&>().empty())
        schema(where, std::string("\"") + key + "\" must be a non-empty string");
    auto path = v.get<std::string>();
    if (header && !header->find(path))
        throw Error(ErrorCode::UnknownModulePath, where + ": \"" + path + "\" not in trace");
    return path;
}

AddressRange range_member(const json& obj, const std::string& where) {
    const auto& r = member(obj, "range", where);
    if (!r.is_array() || r.size() != 2 || !r[0].is_string() || !r[1].is_string())
        schema(where, "\"range\" must be [\"0x..\", \"0x..\"]");
    auto lo = parse_address(r[0].get<std::string>());
    auto hi = parse_address(r[1].get<std::string>());
    if (!lo || !hi)
        schema(where, "bad hex address in \"range\"");
    if (*lo > *hi)
        throw Error(ErrorCode::InvalidRange, where + ": " + r[0].get<std::string>() + " > " +
                                                 r[1].get<std::string>());
    return {*lo, *hi};
}

int type_id(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        schema(where, "transaction type must be an integer");
    auto id = v.get<long long>();
    if (id < 1 || id > 13)
        schema(where, "transaction type " + std::to_string(id) + " outside 1..13");
    return static_cast<int>(id);
}

SimTime delay_member(const json& obj, const std::string& where) {
    const auto& v = member(obj, "td_max", where);
    if (v.is_number_unsigned())
        return SimTime(v.get<std::uint64_t>());
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        std::uint64_t ps = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), ps);
        if (ec == std::errc() && p == s.data() + s.size() && !s.empty())
            return SimTime(ps);
    }
    schema(where, "\"td_max\" must be a non-negative decimal picosecond count");
}

std::string describe(const std::string& im, const AllowedAccess& a) {
    std::string s = im + " -> " + a.tm + " [" + format_address(a.range.lo) + ", " +
                    format_address(a.range.hi) + "] tt {";
    bool first = true;
    for (int t : a.tt) {
        s += (first ? "" : ",") + std::to_string(t);
        first = false;
    }
    return s + "}";
}

std::string describe(const TimingSpecEntry& e) {
    return e.im + " -> " + e.tm + " [" + format_address(e.range.lo) + ", " +
           format_address(e.range.hi) + "] tt " + std::to_string(e.tt) +
           " td <= " + std::to_string(e.td_max.ps) + " ps";
}

std::string describe(const AccessPath& p) {
    return p.im.instance_path + " -> " + p.tm.instance_path + " @" + format_address(p.tadr) +
           " tt " + (p.tt ? std::to_string(*p.tt) : "UNKNOWN");
}

Violation path_violation(const AccessPath& p, PropertyKind kind, std::string rule) {
    Violation v;
    v.rule = std::move(rule);
    v.kind = kind;
    v.tx_id = p.tid;
    v.module = p.im;
    return v;
}

} // namespace

std::string nomatch_property_id(std::string_view im) {
    return "FP-NOMATCH(" + std::string(im) + ")";
}

VpSpec parse_spec(std::string_view text, const TraceHeader* header) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        schema("spec", e.what());
    }
    if (!root.is_object())
        schema("spec", "top level must be an object");
    for (const auto& [k, v] : root.items())
        if (k != "functional" && k != "timing")
            schema("spec", "unexpected key \"" + k + "\"");

    VpSpec spec;
    if (root.contains("functional")) {
        const auto& arr = root["functional"];
        if (!arr.is_array())
            schema("functional", "must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto where = "functional[" + std::to_string(i) + "]";
            FunctionalSpecEntry e;
            e.im = path_member(arr[i], "im", where, header);
            const auto& allowed = member(arr[i], "allowed", where);
            if (!allowed.is_array())
                schema(where, "\"allowed\" must be an array");
            if (allowed.empty())
                throw Error(ErrorCode::EmptyAllowList, where + ": initiator " + e.im +
                                                           " has no allowed accesses");
            for (std::size_t j = 0; j < allowed.size(); ++j) {
                auto w = where + ".allowed[" + std::to_string(j) + "]";
                AllowedAccess a;
                a.tm = path_member(allowed[j], "tm", w, header);
                a.range = range_member(allowed[j], w);
                const auto& tts = member(allowed[j], "tt", w);
                if (!tts.is_array() || tts.empty())
                    schema(w, "\"tt\" must be a non-empty array");
                for (const auto& t : tts)
                    a.tt.insert(type_id(t, w));
                e.allowed.push_back(std::move(a));
            }
            spec.functional.push_back(std::move(e));
        }
    }
    if (root.contains("timing")) {
        const auto& arr = root["timing"];
        if (!arr.is_array())
            schema("timing", "must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            auto where = "timing[" + std::to_string(i) + "]";
            TimingSpecEntry e;
            e.im = path_member(arr[i], "im", where, header);
            e.tm = path_member(arr[i], "tm", where, header);
            e.range = range_member(arr[i], where);
            e.tt = type_id(member(arr[i], "tt", where), where);
            e.td_max = delay_member(arr[i], where);
            spec.timing.push_back(std::move(e));
        }
    }
    return spec;
}

VpSpec read_spec_file(const std::filesystem::path& path, const TraceHeader* header) {
    return parse_spec(read_file_bytes(path), header);
}

std::string serialize_spec(const VpSpec& spec) {
    ordered_json root;
    root["functional"] = ordered_json::array();
    for (const auto& e : spec.functional) {
        ordered_json je;
        je["im"] = e.im;
        je["allowed"] = ordered_json::array();
        for (const auto& a : e.allowed) {
            ordered_json ja;
            ja["tm"] = a.tm;
            ja["range"] = {format_address(a.range.lo), format_address(a.range.hi)};
            ja["tt"] = std::vector<int>(a.tt.begin(), a.tt.end());
            je["allowed"].push_back(std::move(ja));
        }
        root["functional"].push_back(std::move(je));
    }
    root["timing"] = ordered_json::array();
    for (const auto& e : spec.timing) {
        ordered_json je;
        je["im"] = e.im;
        je["tm"] = e.tm;
        je["range"] = {format_address(e.range.lo), format_address(e.range.hi)};
        je["tt"] = e.tt;
        je["td_max"] = std::to_string(e.td_max.ps);
        root["timing"].push_back(std::move(je));
    }
    return root.dump(2) + "\n";
}

std::vector<Property> functional_properties(const VpSpec& spec) {
    std::vector<Property> out;
    for (const auto& e : spec.functional)
        for (const auto& a : e.allowed)
            out.push_back({"FP-" + std::to_string(out.size() + 1), PropertyKind::Functional,
                           describe(e.im, a), 0});
    return out;
}

std::vector<Property> timing_properties(const VpSpec& spec) {
    std::vector<Property> out;
    for (const auto& e : spec.timing)
        out.push_back({"TP-" + std::to_string(out.size() + 1), PropertyKind::Timing,
                       describe(e), 0});
    return out;
}

SpecCheck validate_functional(const Sap& sap, const VpSpec& spec) {
    SpecCheck out;
    out.properties = functional_properties(spec);

    // Flattened tuples per initiator, carrying their property index.
    struct Tuple {
        const AllowedAccess* access;
        std::size_t prop;
    };
    std::map<std::string, std::vector<Tuple>> by_im;
    std::size_t k = 0;
    for (const auto& e : spec.functional)
        for (const auto& a : e.allowed)
            by_im[e.im].push_back({&a, k++});

    std::map<std::string, std::size_t> nomatch; // im -> violations
    for (const auto& p : sap.paths) {
        auto it = by_im.find(p.im.instance_path);
        if (it == by_im.end()) {
            out.diagnostics.push_back("UnspecifiedInitiator: tx " + std::to_string(p.tid) +
                                      " issued by " + p.im.instance_path +
                                      " which has no functional spec entry");
            continue;
        }
        const auto& tuples = it->second;
        auto matches = [&](const Tuple& t) {
            return t.access->tm == p.tm.instance_path && t.access->range.contains(p.tadr) &&
                   p.tt && t.access->tt.count(*p.tt);
        };
        if (std::any_of(tuples.begin(), tuples.end(), matches))
            continue;

        // Attribute to the nearest tuple: same target and address first,
        // then same target, else a per-initiator no-match property.
        const Tuple* nearest = nullptr;
        for (const auto& t : tuples)
            if (t.access->tm == p.tm.instance_path && t.access->range.contains(p.tadr)) {
                nearest = &t;
                break;
            }
        if (!nearest)
            for (const auto& t : tuples)
                if (t.access->tm == p.tm.instance_path) {
                    nearest = &t;
                    break;
                }

        if (nearest) {
            auto& prop = out.properties[nearest->prop];
            auto v = path_violation(p, PropertyKind::Functional, prop.id);
            v.observed = describe(p);
            v.expected = prop.source;
            v.message = nearest->access->range.contains(p.tadr)
                            ? "transaction type not allowed for this access"
                            : "address outside the allowed range";
            v.sequence_index = 1;
            ++prop.violations;
            out.violations.push_back(std::move(v));
        } else {
            auto v = path_violation(p, PropertyKind::Functional,
                                    nomatch_property_id(p.im.instance_path));
            v.observed = describe(p);
            v.expected = "an allowed target of " + p.im.instance_path;
            v.message = "target not allowed for this initiator";
            v.sequence_index = 1;
            ++nomatch[p.im.instance_path];
            out.violations.push_back(std::move(v));
        }
    }
    for (const auto& [im, n] : nomatch)
        out.properties.push_back({nomatch_property_id(im), PropertyKind::Functional,
                                  im + " accesses only listed targets", n});
    std::stable_sort(out.violations.begin(), out.violations.end(), violation_less);
    return out;
}

SpecCheck validate_timing(const Sap& sap, const VpSpec& spec, TimingMode mode) {
    SpecCheck out;
    out.properties = timing_properties(spec);
    for (const auto& p : sap.paths) {
        for (std::size_t i = 0; i < spec.timing.size(); ++i) {
            const auto& e = spec.timing[i];
            if (e.im != p.im.instance_path || e.tm != p.tm.instance_path ||
                !e.range.contains(p.tadr) || !p.tt || *p.tt != e.tt)
                continue;
            bool ok = mode == TimingMode::Exact ? p.td == e.td_max : p.td <= e.td_max;
            if (ok)
                continue;
            auto& prop = out.properties[i];
            auto v = path_violation(p, PropertyKind::Timing, prop.id);
            v.observed = std::to_string(p.td.ps) + " ps";
            v.expected = (mode == TimingMode::Exact ? "== " : "<= ") +
                         std::to_string(e.td_max.ps) + " ps";
            v.message = "total delay " + std::string(mode == TimingMode::Exact
                                                         ? "differs from"
                                                         : "exceeds") +
                        " the specified delay for " + describe(p);
            v.sequence_index = p.final_sequence;
            ++prop.violations;
            out.violations.push_back(std::move(v));
        }
    }
    std::stable_sort(out.violations.begin(), out.violations.end(), violation_less);
    return out;
}

} // namespace vpcheck
