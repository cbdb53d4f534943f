#include "vpcheck/base_protocol.hpp"
#include "vpcheck/error.hpp"
#include "vpcheck/report.hpp"
#include "vpcheck/rule_engine.hpp"
#include "vpcheck/synth_vp.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace vpcheck;

namespace {

TimingMode timing_mode(const std::string& s) {
    if (s == "bound")
        return TimingMode::UpperBound;
    if (s == "exact")
        return TimingMode::Exact;
    throw Error(ErrorCode::ConfigError, "unknown timing mode \"" + s + "\" (bound, exact)");
}

GenConfig config_from(const std::string& preset_or_json, std::optional<std::uint64_t> seed) {
    GenConfig cfg;
    if (preset_or_json == "routing")
        cfg = routing_replica(1);
    else if (preset_or_json == "at")
        cfg = at_replica(1);
    else if (preset_or_json == "mixed")
        cfg = mixed_replica(1);
    else
        cfg = parse_gen_config(preset_or_json);
    if (seed)
        cfg.workload.seed = *seed;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_vpcheck, m) {
    m.doc() = "TLM-2.0 base protocol and VP specification checker";

    static PyObject* error_type =
        PyErr_NewException("vpcheck.VpcheckError", PyExc_ValueError, nullptr);
    m.attr("VpcheckError") = py::reinterpret_borrow<py::object>(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            auto exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            if (e.location())
                exc.attr("location") = *e.location();
            else
                exc.attr("location") = py::none();
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    m.def(
        "check_json",
        [](const std::string& trace_text, const std::string& spec_text, bool force_phase2,
           const std::string& mode) {
            auto trace = parse_trace(trace_text);
            auto spec = parse_spec(spec_text, &trace.header);
            return emit_report(run_check(trace, spec, {force_phase2, timing_mode(mode)}), "json");
        },
        py::arg("trace"), py::arg("spec"), py::arg("force_phase2") = false,
        py::arg("timing_mode") = "bound", "Check trace text against spec text; json report.");

    m.def(
        "check_files_json",
        [](const std::string& trace_path, const std::string& spec_path, bool force_phase2,
           const std::string& mode) {
            return emit_report(
                run_check_files(trace_path, spec_path, {force_phase2, timing_mode(mode)}), "json");
        },
        py::arg("trace_path"), py::arg("spec_path"), py::arg("force_phase2") = false,
        py::arg("timing_mode") = "bound");

    m.def(
        "render_report",
        [](const std::string& report_json, const std::string& format) {
            return emit_report(report_from_json(report_json), format);
        },
        py::arg("report_json"), py::arg("format") = "text");

    m.def("types", [] {
        std::vector<std::tuple<int, std::string, std::string>> out;
        for (const auto& t : reference_types())
            out.emplace_back(t.id, std::string(to_string(t.timing_model)), t.signature.text());
        return out;
    });

    m.def("rules", [] {
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& r : rule_catalog())
            out.emplace_back(r.code, std::string(to_string(r.category)), r.description);
        return out;
    });

    m.def(
        "classify_signature",
        [](const std::string& text) -> py::object {
            auto sig = parse_signature(text);
            if (!sig)
                throw Error(ErrorCode::SyntaxError, "bad signature \"" + text + "\"");
            auto c = classify_signature(*sig);
            if (auto id = type_id_of(c))
                return py::int_(*id);
            const auto& tv = std::get<TypeViolation>(c);
            py::dict d;
            d["first_faulty_index"] = tv.first_faulty_index;
            d["expected_next"] = tv.expected_next;
            return std::move(d);
        },
        py::arg("signature"),
        "Type id for a valid signature, else a dict with the first faulty index.");

    m.def(
        "generate",
        [](const std::string& config, std::optional<std::uint64_t> seed) {
            auto cfg = config_from(config, seed);
            return std::make_pair(serialize_trace(generate_trace(cfg)),
                                  serialize_spec(emit_reference_spec(cfg)));
        },
        py::arg("config"), py::arg("seed") = py::none(),
        "Preset name (routing, at, mixed) or config json -> (trace text, spec text).");

    m.def(
        "inject",
        [](const std::string& trace_text, const std::string& plan_json,
           std::optional<std::string> config) {
            auto plan = parse_fault_plan(plan_json);
            if (plan.memory_map.empty() && config)
                plan.memory_map = config_from(*config, std::nullopt).topology.targets;
            auto r = inject_fault(parse_trace(trace_text), plan);
            return std::make_pair(serialize_trace(r.trace), serialize_truth(r.truth));
        },
        py::arg("trace"), py::arg("plan"), py::arg("config") = py::none(),
        "Inject faults; returns (faulty trace text, ground truth json).");
}
