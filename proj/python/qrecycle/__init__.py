"""Entanglement distillation with recycled Gisin-filter reflections."""

import json as _json

from ._core import (
    Error,
    __version__,
    apply_channel,
    bell_fidelity,
    concurrence,
    damped_epr_state,
    enumerate_outcomes,
    epr_state,
    fidelity,
    optimize,
    partial_transpose_b,
    ppt_report,
    psd_sqrt,
    run_sweep,
    sweep_document_json,
)


def sweep_document(**kwargs):
    """Sweep and return the JSON document (spec, rows, summary) as a dict."""
    return _json.loads(sweep_document_json(**kwargs))


__all__ = [
    "Error",
    "__version__",
    "apply_channel",
    "bell_fidelity",
    "concurrence",
    "damped_epr_state",
    "enumerate_outcomes",
    "epr_state",
    "fidelity",
    "optimize",
    "partial_transpose_b",
    "ppt_report",
    "psd_sqrt",
    "run_sweep",
    "sweep_document",
]
