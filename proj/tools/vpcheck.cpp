// vpcheck command-line front end.

#include "vpcheck/base_protocol.hpp"
#include "vpcheck/error.hpp"
#include "vpcheck/report.hpp"
#include "vpcheck/rule_engine.hpp"
#include "vpcheck/synth_vp.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <unistd.h>

using namespace vpcheck;

namespace {

constexpr int kInputError = 2;

bool use_color() {
    return std::getenv("NO_COLOR") == nullptr && isatty(fileno(stdout));
}

std::string_view scope_text(RuleScope s) {
    switch (s) {
    case RuleScope::Any: return "any";
    case RuleScope::LT: return "LT";
    case RuleScope::AT: return "AT";
    }
    return "?";
}

GenConfig preset(const std::string& name, std::uint64_t seed) {
    if (name == "routing")
        return routing_replica(seed);
    if (name == "at")
        return at_replica(seed);
    if (name == "mixed")
        return mixed_replica(seed);
    throw Error(ErrorCode::ConfigError, "unknown preset \"" + name + "\" (routing, at, mixed)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"TLM-2.0 base protocol and VP specification checker"};
    app.require_subcommand(1);

    // check
    auto* check = app.add_subcommand("check", "verify a trace against the protocol and a spec");
    std::string trace_path, spec_path, format = "text", timing_mode = "bound";
    bool force_phase2 = false, show_timings = false;
    check->add_option("--trace", trace_path, "vptrace-1 file (.gz accepted)")->required();
    check->add_option("--spec", spec_path, "spec file")->required();
    check->add_flag("--force-phase2", force_phase2,
                    "check functional and timing properties even after protocol violations");
    check->add_option("--format", format, "text or json");
    check->add_option("--timing-mode", timing_mode, "bound (td <= td_max) or exact");
    check->add_flag("--timings", show_timings, "include wall-clock per phase");

    auto* types = app.add_subcommand("types", "list the base protocol transaction types");
    auto* rules = app.add_subcommand("rules", "list the protocol rule catalog");

    // gen
    auto* gen = app.add_subcommand("gen", "generate a clean synthetic trace");
    std::string config_path, out_path, spec_out, preset_name;
    std::optional<std::uint64_t> seed;
    auto* cfg_opt = gen->add_option("--config", config_path, "topology/workload config");
    auto* preset_opt = gen->add_option("--preset", preset_name, "routing, at or mixed");
    cfg_opt->excludes(preset_opt);
    gen->add_option("--seed", seed, "override the workload seed");
    gen->add_option("--out", out_path, "trace output (.gz compresses)")->required();
    gen->add_option("--spec-out", spec_out, "also write the reference spec");

    // inject
    auto* inject = app.add_subcommand("inject", "inject faults into a clean trace");
    std::string plan_path, truth_path, inject_config;
    inject->add_option("--trace", trace_path, "clean trace")->required();
    inject->add_option("--plan", plan_path, "fault plan")->required();
    inject->add_option("--out", out_path, "faulty trace output")->required();
    inject->add_option("--truth", truth_path, "ground truth output")->required();
    inject->add_option("--config", inject_config, "generator config supplying the memory map");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kInputError;
    }

    try {
        if (*check) {
            CheckOptions opts;
            opts.force_phase2 = force_phase2;
            if (timing_mode == "exact")
                opts.timing_mode = TimingMode::Exact;
            else if (timing_mode != "bound")
                throw Error(ErrorCode::ConfigError,
                            "unknown timing mode \"" + timing_mode + "\" (bound, exact)");
            if (format != "text" && format != "json")
                throw Error(ErrorCode::UnknownFormat,
                            "unknown report format \"" + format + "\" (expected text or json)");
            auto report = run_check_files(trace_path, spec_path, opts);
            EmitOptions eo;
            eo.color = format == "text" && use_color();
            eo.timings = show_timings;
            std::cout << emit_report(report, format, eo);
            return exit_code(report);
        }
        if (*types) {
            for (const auto& t : reference_types())
                std::cout << t.id << '\t' << to_string(t.timing_model) << '\t'
                          << t.signature.text() << '\n';
            return 0;
        }
        if (*rules) {
            for (const auto& r : rule_catalog())
                std::cout << r.code << '\t' << scope_text(r.scope) << '\t' << r.description
                          << '\n';
            return 0;
        }
        if (*gen) {
            GenConfig cfg;
            if (!preset_name.empty())
                cfg = preset(preset_name, seed.value_or(1));
            else if (!config_path.empty())
                cfg = read_gen_config(config_path);
            else
                throw Error(ErrorCode::ConfigError, "gen needs --config or --preset");
            if (seed)
                cfg.workload.seed = *seed;
            write_trace_file(out_path, generate_trace(cfg));
            if (!spec_out.empty())
                write_file_bytes(spec_out, serialize_spec(emit_reference_spec(cfg)));
            return 0;
        }
        if (*inject) {
            auto trace = read_trace_file(trace_path);
            auto plan = parse_fault_plan(read_file_bytes(plan_path));
            if (plan.memory_map.empty() && !inject_config.empty())
                plan.memory_map = read_gen_config(inject_config).topology.targets;
            auto result = inject_fault(trace, plan);
            write_trace_file(out_path, result.trace);
            write_file_bytes(truth_path, serialize_truth(result.truth));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "vpcheck: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "vpcheck: internal error: " << e.what() << '\n';
        return kInputError;
    }
    return 0;
}
