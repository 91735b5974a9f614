"""Einstein-bulk embedding toolkit.

Thin wrapper over the C++ core: truncated-jet arithmetic, curvature
residuals, codimension-1 Einstein extensions, glued product metrics and the
homotopy splitting tables.
"""

import json as _json

from ._core import (
    EinbulkError,
    Jet,
    bell_value,
    constant,
    count_equations,
    diff,
    einstein_check,
    embed_local,
    expand,
    homotopy_group,
    parse_shape,
    reciprocal,
    split_product,
    variable,
)
from ._core import run_manifest as _run_manifest_raw

__all__ = [
    "EinbulkError",
    "Jet",
    "bell_value",
    "constant",
    "count_equations",
    "diff",
    "einstein_check",
    "embed_local",
    "expand",
    "homotopy_group",
    "parse_shape",
    "reciprocal",
    "run_manifest",
    "split_product",
    "variable",
]


def run_manifest(manifest, verb=""):
    """Run a manifest (dict or JSON string); returns (exit_code, report dict)."""
    if not isinstance(manifest, str):
        manifest = _json.dumps(manifest)
    code, report = _run_manifest_raw(manifest, verb)
    return code, _json.loads(report)
