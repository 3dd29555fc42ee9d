"""Byte-stable JSON and CSV writers.

Floats are written with 17 significant digits, keys keep insertion order,
files are UTF-8 with LF line endings.
"""
from __future__ import annotations

import csv
import math
import os
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"
PROFILE_COLUMNS = ("x", "zeta", "phi_s", "kinematic_residual", "bernoulli_residual")


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _json(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # non-finite values are not valid JSON numbers
        return fmt(x) if math.isfinite(x) else '"' + fmt(x) + '"'
    if isinstance(obj, str):
        import json
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_json(str(k), indent, level + 1)}: {_json(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in seq):
            return "[" + ", ".join(_json(v, indent, level + 1) for v in seq) + "]"
        return ("[\n" + ",\n".join(pad + _json(v, indent, level + 1) for v in seq)
                + "\n" + end + "]")
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _json(obj, indent, 0) + "\n"


def write_json(path, obj):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(dumps(obj))
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc}") from exc
    return path


def write_csv(path, header, rows):
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write table {path}: {exc}") from exc
    return path


def write_profile(path, x, zeta, phi_s, kinematic, bernoulli):
    cols = [np.asarray(c, dtype=float) for c in (x, zeta, phi_s, kinematic, bernoulli)]
    return write_csv(path, PROFILE_COLUMNS, zip(*cols))


def read_profile(path):
    """Columns of a profile CSV as a dict of float arrays."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body]) if body else np.zeros((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def emit_report(results: dict, out_dir, tables: dict | None = None):
    """Write ``report.json`` plus any ``{filename: (header, rows)}`` tables."""
    out_dir = Path(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    paths = [write_json(out_dir / "report.json", results)]
    for name, (header, rows) in (tables or {}).items():
        paths.append(write_csv(out_dir / name, header, rows))
    return paths
