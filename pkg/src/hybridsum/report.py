"""Deterministic CSV/JSON writers.

Floats are always printed in fixed 17-significant-digit scientific notation,
never the shortest round-trip form, and keys keep insertion order, so equal
data gives byte-equal files.
"""

from __future__ import annotations

import enum
import json
import math
from pathlib import Path

import numpy as np


def fmt_float(v: float) -> str:
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        v = 0.0  # fold -0.0
    return format(v, ".16e")


def _json_float(v: float) -> str:
    s = fmt_float(v)
    return json.dumps(s) if s in ("nan", "inf", "-inf") else s


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """Serialise dicts, lists, tuples, numbers, strings, enums and complex values."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, enum.Enum):
        obj = obj.value
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _json_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, bool, np.number)) or v is None for v in obj):
            return "[" + ", ".join(to_json(v) for v in obj) + "]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(to_json(obj) + "\n", encoding="utf-8")
    return path


def write_series_csv(path, xs, S, projections) -> Path:
    """Columns x, re_S, im_S, u_theta_0, u_theta_1, ..."""
    path = Path(path)
    S = np.asarray(S, dtype=complex)
    header = ["x", "re_S", "im_S"] + [f"u_theta_{k}" for k in range(len(projections))]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for i, x in enumerate(xs):
            row = [str(int(x)), fmt_float(S[i].real), fmt_float(S[i].imag)]
            row += [fmt_float(u[i]) for u in projections]
            fh.write(",".join(row) + "\n")
    return path
