#include "vpcheck/report.hpp"

#include "vpcheck/base_protocol.hpp"
#include "vpcheck/error.hpp"
#include "vpcheck/rule_engine.hpp"
#include "vpcheck/trace_model.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>

namespace vpcheck {

using ordered_json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string timing_model_of(std::span<const TransactionLifetime> lifetimes) {
    bool lt = false, at = false;
    for (const auto& tl : lifetimes) {
        if (tl.sequences.empty())
            continue;
        if (is_nb(tl.sequences.front().interface))
            at = true;
        else
            lt = true;
    }
    if (lt && at)
        return "LT/AT";
    if (lt)
        return "LT";
    if (at)
        return "AT";
    return "-";
}

void tally(Report& r) {
    r.categories.clear();
    for (auto k : {PropertyKind::Type, PropertyKind::Attribute, PropertyKind::Behavior,
                   PropertyKind::Functional, PropertyKind::Timing}) {
        CategoryTotals c;
        c.kind = k;
        for (const auto& p : r.properties) {
            if (p.kind != k)
                continue;
            ++c.total;
            ++(p.passed() ? c.pass : c.fail);
        }
        r.categories.push_back(c);
    }
    r.properties_total = r.properties.size();
    r.pass = static_cast<std::size_t>(
        std::count_if(r.properties.begin(), r.properties.end(),
                      [](const Property& p) { return p.passed(); }));
    r.fail = r.properties_total - r.pass;
    std::set<std::uint64_t> faulty;
    for (const auto& v : r.violations)
        faulty.insert(v.tx_id);
    r.faulty_transactions = faulty.size();
}

} // namespace

Report run_check(const Trace& trace, const VpSpec& spec, const CheckOptions& opts) {
    Report r;
    r.design = trace.header.design_name;

    auto t0 = Clock::now();
    validate_stream(trace.events);
    auto lifetimes = build_lifetimes(trace.events);
    r.timings.push_back({"ingest", ms_since(t0)});

    t0 = Clock::now();
    std::vector<Classification> classes;
    std::vector<std::optional<int>> types;
    classes.reserve(lifetimes.size());
    for (const auto& tl : lifetimes) {
        classes.push_back(classify(tl));
        types.push_back(type_id_of(classes.back()));
    }
    auto protocol = check_protocol(lifetimes, classes);
    r.timings.push_back({"protocol", ms_since(t0)});

    r.n_trans = lifetimes.size();
    std::set<int> distinct;
    for (const auto& t : types)
        if (t)
            distinct.insert(*t);
    r.n_types = distinct.size();
    r.timing_model = timing_model_of(lifetimes);
    r.properties = std::move(protocol.properties);
    r.violations = std::move(protocol.violations);

    bool clean = r.violations.empty();
    if (clean || opts.force_phase2) {
        t0 = Clock::now();
        auto sap = build_sap(lifetimes, types);
        for (const auto& d : sap.diagnostics)
            r.diagnostics.push_back(d.message);
        for (auto check : {validate_functional(sap.sap, spec),
                           validate_timing(sap.sap, spec, opts.timing_mode)}) {
            r.properties.insert(r.properties.end(), check.properties.begin(),
                                check.properties.end());
            r.violations.insert(r.violations.end(), check.violations.begin(),
                                check.violations.end());
            r.diagnostics.insert(r.diagnostics.end(), check.diagnostics.begin(),
                                 check.diagnostics.end());
        }
        r.phase2_ran = true;
        r.timings.push_back({"spec", ms_since(t0)});
    } else {
        r.phase2_gated = true;
    }

    std::sort(r.violations.begin(), r.violations.end(), violation_less);
    tally(r);
    return r;
}

Report run_check_files(const std::filesystem::path& trace_path,
                       const std::filesystem::path& spec_path, const CheckOptions& opts) {
    auto t0 = Clock::now();
    auto trace = read_trace_file(trace_path);
    auto spec = read_spec_file(spec_path, &trace.header);
    double read_ms = ms_since(t0);
    auto r = run_check(trace, spec, opts);
    r.timings.front().ms += read_ms;
    return r;
}

int exit_code(const Report& r) {
    return r.fail == 0 && r.violations.empty() ? 0 : 1;
}

// --- text ------------------------------------------------------------------------

namespace {

struct Style {
    bool on;
    std::string red(std::string_view s) const { return wrap("\x1b[31m", s); }
    std::string green(std::string_view s) const { return wrap("\x1b[32m", s); }
    std::string bold(std::string_view s) const { return wrap("\x1b[1m", s); }
    std::string wrap(std::string_view code, std::string_view s) const {
        if (!on)
            return std::string(s);
        return std::string(code) + std::string(s) + "\x1b[0m";
    }
};

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w)
        s.append(w - s.size(), ' ');
    return s;
}

std::string emit_text(const Report& r, const EmitOptions& opts) {
    Style st{opts.color};
    std::string out;
    auto line = [&](std::string s) {
        out += s;
        out += '\n';
    };

    line(st.bold("Design: " + r.design));
    line("Transactions: " + std::to_string(r.n_trans) + "  Types: " + std::to_string(r.n_types) +
         "  TM: " + r.timing_model);
    line("");
    line(pad("Category", 12) + pad("Total", 8) + pad("Pass", 8) + "Fail");
    for (const auto& c : r.categories) {
        if (c.total == 0)
            continue;
        auto fail = std::to_string(c.fail);
        line(pad(std::string(to_string(c.kind)), 12) + pad(std::to_string(c.total), 8) +
             pad(std::to_string(c.pass), 8) + (c.fail ? st.red(fail) : fail));
    }
    line("");

    auto failed = std::count_if(r.properties.begin(), r.properties.end(),
                                [](const Property& p) { return !p.passed(); });
    if (failed) {
        line("Failed properties:");
        for (const auto& p : r.properties)
            if (!p.passed())
                line("  " + st.red(p.id) + "  " + p.source + " (" +
                     std::to_string(p.violations) + " violation" +
                     (p.violations == 1 ? "" : "s") + ")");
        line("");
    }
    if (!r.violations.empty()) {
        line("Violations:");
        for (const auto& v : r.violations) {
            std::string s = "  tx " + std::to_string(v.tx_id) + " seq " +
                            std::to_string(v.sequence_index) + " " + v.rule + ": " + v.message;
            if (v.module)
                s += " [" + v.module->instance_path + "]";
            line(s);
            if (!v.observed.empty())
                line("      observed: " + v.observed);
            if (!v.expected.empty())
                line("      expected: " + v.expected);
        }
        line("");
    }
    for (const auto& d : r.diagnostics)
        line("note: " + d);
    if (r.phase2_gated)
        line("note: functional and timing properties not checked, protocol violations must be "
             "fixed first (use --force-phase2 to check anyway)");
    if (opts.timings)
        for (const auto& t : r.timings) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3f ms", t.ms);
            line("time " + t.phase + ": " + buf);
        }

    auto verdict = "Pass: " + std::to_string(r.pass) + ", Fail: " + std::to_string(r.fail);
    line(r.fail ? st.red(verdict) : st.green(verdict));
    line("Totals: Total=" + std::to_string(r.properties_total) + ", Pass=" +
         std::to_string(r.pass) + ", Fail=" + std::to_string(r.fail) +
         ", FTrans=" + std::to_string(r.faulty_transactions));
    return out;
}

// --- json ------------------------------------------------------------------------

ordered_json module_json(const ModuleRef& m) {
    ordered_json j;
    j["path"] = m.instance_path;
    j["root"] = m.root_name;
    j["role"] = to_string(m.role);
    return j;
}

std::string emit_json(const Report& r, const EmitOptions& opts) {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["design"] = r.design;
    j["n_trans"] = r.n_trans;
    j["n_types"] = r.n_types;
    j["timing_model"] = r.timing_model;
    j["totals"] = {{"total", r.properties_total},
                   {"pass", r.pass},
                   {"fail", r.fail},
                   {"faulty_transactions", r.faulty_transactions}};
    auto& cats = j["categories"] = ordered_json::array();
    for (const auto& c : r.categories)
        cats.push_back({{"kind", to_string(c.kind)},
                        {"total", c.total},
                        {"pass", c.pass},
                        {"fail", c.fail}});
    auto& props = j["properties"] = ordered_json::array();
    for (const auto& p : r.properties)
        props.push_back({{"id", p.id},
                         {"kind", to_string(p.kind)},
                         {"source", p.source},
                         {"violations", p.violations}});
    auto& viols = j["violations"] = ordered_json::array();
    for (const auto& v : r.violations) {
        ordered_json o;
        o["rule"] = v.rule;
        o["kind"] = to_string(v.kind);
        o["tx"] = v.tx_id;
        o["seq"] = v.sequence_index;
        o["module"] = v.module ? module_json(*v.module) : ordered_json(nullptr);
        o["message"] = v.message;
        o["observed"] = v.observed;
        o["expected"] = v.expected;
        viols.push_back(std::move(o));
    }
    j["diagnostics"] = r.diagnostics;
    j["phase2"] = {{"ran", r.phase2_ran}, {"gated", r.phase2_gated}};
    if (opts.timings) {
        auto& t = j["timings"] = ordered_json::array();
        for (const auto& pt : r.timings)
            t.push_back({{"phase", pt.phase}, {"ms", pt.ms}});
    }
    return j.dump(2) + "\n";
}

[[noreturn]] void schema_error(const std::string& why) {
    throw Error(ErrorCode::SchemaError, "report: " + why);
}

PropertyKind kind_of(const ordered_json& j) {
    auto k = parse_property_kind(j.get<std::string>());
    if (!k)
        schema_error("unknown property kind " + j.dump());
    return *k;
}

} // namespace

std::string emit_report(const Report& r, std::string_view format, const EmitOptions& opts) {
    if (format == "text")
        return emit_text(r, opts);
    if (format == "json")
        return emit_json(r, opts);
    throw Error(ErrorCode::UnknownFormat, "unknown report format \"" + std::string(format) +
                                              "\" (expected text or json)");
}

Report report_from_json(std::string_view text) {
    try {
        auto j = ordered_json::parse(text);
        if (j.at("schema").get<std::string>() != kReportSchema)
            schema_error("unsupported schema " + j["schema"].dump());
        Report r;
        r.design = j.at("design").get<std::string>();
        r.n_trans = j.at("n_trans").get<std::size_t>();
        r.n_types = j.at("n_types").get<std::size_t>();
        r.timing_model = j.at("timing_model").get<std::string>();
        const auto& t = j.at("totals");
        r.properties_total = t.at("total").get<std::size_t>();
        r.pass = t.at("pass").get<std::size_t>();
        r.fail = t.at("fail").get<std::size_t>();
        r.faulty_transactions = t.at("faulty_transactions").get<std::size_t>();
        for (const auto& c : j.at("categories"))
            r.categories.push_back({kind_of(c.at("kind")), c.at("total").get<std::size_t>(),
                                    c.at("pass").get<std::size_t>(),
                                    c.at("fail").get<std::size_t>()});
        for (const auto& p : j.at("properties"))
            r.properties.push_back({p.at("id").get<std::string>(), kind_of(p.at("kind")),
                                    p.at("source").get<std::string>(),
                                    p.at("violations").get<std::size_t>()});
        for (const auto& o : j.at("violations")) {
            Violation v;
            v.rule = o.at("rule").get<std::string>();
            v.kind = kind_of(o.at("kind"));
            v.tx_id = o.at("tx").get<std::uint64_t>();
            v.sequence_index = o.at("seq").get<std::size_t>();
            if (const auto& m = o.at("module"); !m.is_null()) {
                auto role = parse_role(m.at("role").get<std::string>());
                if (!role)
                    schema_error("unknown role " + m["role"].dump());
                v.module = ModuleRef{m.at("root").get<std::string>(),
                                     m.at("path").get<std::string>(), *role};
            }
            v.message = o.at("message").get<std::string>();
            v.observed = o.at("observed").get<std::string>();
            v.expected = o.at("expected").get<std::string>();
            r.violations.push_back(std::move(v));
        }
        r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
        r.phase2_ran = j.at("phase2").at("ran").get<bool>();
        r.phase2_gated = j.at("phase2").at("gated").get<bool>();
        if (j.contains("timings"))
            for (const auto& pt : j["timings"])
                r.timings.push_back({pt.at("phase").get<std::string>(), pt.at("ms").get<double>()});
        if (r.pass + r.fail != r.properties_total)
            schema_error("pass + fail differs from total");
        return r;
    } catch (const nlohmann::json::exception& e) {
        schema_error(e.what());
    }
}

} // namespace vpcheck
