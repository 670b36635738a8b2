"""Deterministic CSV/JSON writers and run manifests."""

from __future__ import annotations

import io as _io
import json
import math
from pathlib import Path

import numpy as np

FLOAT_FORMAT = ".12g"


def format_float(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, FLOAT_FORMAT)


def format_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    return str(v)


def to_json_value(v):
    """Plain JSON types; ``inf`` becomes the string ``"inf"`` and NaN becomes null."""
    if isinstance(v, dict):
        return {str(k): to_json_value(val) for k, val in v.items()}
    if isinstance(v, (list, tuple, set, frozenset, np.ndarray)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return [to_json_value(x) for x in items]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(format(v, FLOAT_FORMAT))
    return v


def render_csv(fields, rows) -> str:
    buf = _io.StringIO()
    buf.write(",".join(fields) + "\n")
    for row in rows:
        buf.write(",".join(format_cell(row.get(f)) for f in fields) + "\n")
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(to_json_value(obj), indent=2) + "\n"


def render_rows(fields, rows, fmt: str) -> str:
    if fmt == "json":
        return render_json([{f: row.get(f) for f in fields} for row in rows])
    return render_csv(fields, rows)


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def manifest_path(out) -> Path:
    return Path(str(out) + ".manifest.json")


def write_manifest(out, manifest: dict) -> Path:
    path = manifest_path(out)
    write_text(path, render_json(manifest))
    return path


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
