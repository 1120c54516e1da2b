"""JSON and CSV serialization of suite reports.

Floats are written with 17 significant digits, which round-trips every
IEEE double exactly.  Files are written to a temporary sibling and renamed
into place.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

from .verification import SuiteReport

REPORT_SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, (int, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with deterministic layout and 17-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def suite_to_dict(report: SuiteReport) -> dict[str, Any]:
    failed = sum(1 for _ in report.failures())
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "seed": report.seed,
        "passed": report.passed,
        "summary": {
            "cases": len(report.cases),
            "reports": sum(len(c.reports) for c in report.cases),
            "failed": failed,
        },
        "cases": [
            {
                "case_index": c.case_index,
                "descriptor": c.descriptor,
                "passed": c.passed,
                "reports": [r.to_dict() for r in c.reports],
            }
            for c in report.cases
        ],
    }


CSV_COLUMNS = (
    "case_index", "p", "q", "nu", "eps", "R", "r", "r3",
    "identity_id", "samples", "max_residual", "tolerance", "passed",
    "worst_seed", "worst_stream", "worst_point_index", "worst_tangent_index",
)


def _signs(v) -> str:
    return "".join("+" if s > 0 else "-" for s in v)


def to_csv(report: SuiteReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for c in report.cases:
        d = c.descriptor
        for r in c.reports:
            wc = r.worst_case
            tidx = wc.get("tangent_index")
            w.writerow([
                c.case_index, d["p"], d["q"], _signs(d["nu"]), _signs(d["eps"]),
                format_float(d["R"]), format_float(d["r"]), format_float(d["r3"]),
                r.identity_id, r.samples, format_float(r.max_residual), format_float(r.tolerance),
                "true" if r.passed else "false",
                wc.get("seed", ""), wc.get("stream", ""), wc.get("point_index", ""),
                "" if tidx is None else tidx,
            ])
    return buf.getvalue()


def render(report: SuiteReport, fmt: str) -> str:
    if fmt == "json":
        return dumps(suite_to_dict(report))
    if fmt == "csv":
        return to_csv(report)
    raise ValueError(f"unknown format {fmt!r}")


def write_atomic(path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
