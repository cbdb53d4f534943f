"""Python front end for the vpcheck trace verifier."""

import json

from ._vpcheck import (
    VpcheckError,
    check_files_json,
    check_json,
    classify_signature,
    generate,
    inject,
    render_report,
    rules,
    types,
)

__all__ = [
    "VpcheckError",
    "check",
    "check_files",
    "check_json",
    "check_files_json",
    "classify_signature",
    "generate",
    "inject",
    "render_report",
    "rules",
    "types",
]


def check(trace, spec, force_phase2=False, timing_mode="bound"):
    """Check trace text against spec text and return the report as a dict."""
    return json.loads(check_json(trace, spec, force_phase2, timing_mode))


def check_files(trace_path, spec_path, force_phase2=False, timing_mode="bound"):
    return json.loads(check_files_json(str(trace_path), str(spec_path), force_phase2, timing_mode))
