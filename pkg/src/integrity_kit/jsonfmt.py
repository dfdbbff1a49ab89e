"""Canonical JSON: sorted keys, stable float text, byte-identical reruns."""
from __future__ import annotations

import json
import math

import numpy as np


def format_float(x: float, digits: int | None = 17) -> str:
    """Render a float for JSON/CSV output.

    ``digits=17`` always round-trips bit-exactly; ``digits=None`` uses the
    shortest round-tripping repr.  A ``.0`` is kept so the value reads back
    as a float.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite float {x!r}")
    text = repr(x) if digits is None else format(x, f".{digits}g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def dumps(obj, *, digits: int | None = 17, indent: int | None = None) -> str:
    out: list[str] = []
    _emit(obj, out, digits, indent, 0)
    return "".join(out)


def _emit(o, out, digits, indent, level):
    if o is None:
        out.append("null")
    elif isinstance(o, (bool, np.bool_)):
        out.append("true" if o else "false")
    elif isinstance(o, (int, np.integer)):
        out.append(str(int(o)))
    elif isinstance(o, (float, np.floating)):
        out.append(format_float(o, digits))
    elif isinstance(o, str):
        out.append(json.dumps(o))
    elif isinstance(o, dict):
        if not o:
            out.append("{}")
            return
        items = sorted(o.items())
        out.append("{")
        for i, (k, v) in enumerate(items):
            if not isinstance(k, str):
                raise TypeError(f"JSON keys must be strings, got {k!r}")
            if i:
                out.append(",")
            _newline(out, indent, level + 1)
            out.append(json.dumps(k))
            out.append(": " if indent is not None else ":")
            _emit(v, out, digits, indent, level + 1)
        _newline(out, indent, level)
        out.append("}")
    elif isinstance(o, (list, tuple, np.ndarray)):
        seq = o.tolist() if isinstance(o, np.ndarray) else o
        if not seq:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(seq):
            if i:
                out.append(",")
            _newline(out, indent, level + 1)
            _emit(v, out, digits, indent, level + 1)
        _newline(out, indent, level)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(o).__name__}")


def _newline(out, indent, level):
    if indent is not None:
        out.append("\n" + " " * (indent * level))
