"""Deterministic numeric and JSON formatting shared by all report writers.

All numeric report output uses point-decimal notation with 17 significant
digits, which round-trips IEEE double exactly. The stdlib ``json`` module
cannot format floats that way, hence the small emitter below; string
escaping is delegated back to ``json.dumps``.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np


def fmt_float(x: float) -> str:
    """17-significant-digit point-decimal rendering of a finite float."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value in report output: {x!r}")
    return format(x, ".17g")


def _emit(obj: Any, indent: int, level: int, out: list[str]) -> None:
    pad = " " * (indent * level)
    child_pad = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(child_pad)
            out.append(json.dumps(str(key)))
            out.append(": ")
            _emit(value, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(child_pad)
            _emit(value, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(obj, bool) or isinstance(obj, np.bool_):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(fmt_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__} to report JSON")


def dumps_json(obj: Any, indent: int = 2) -> str:
    """Serialize to JSON with deterministic key order and .17g floats."""
    out: list[str] = []
    _emit(obj, indent, 0, out)
    out.append("\n")
    return "".join(out)
