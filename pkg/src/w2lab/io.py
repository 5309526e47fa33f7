"""JSON documents for measures, couplings and scalars.

A measure document is ``{"dimension": d, "points": [[...], ...],
"weights": [...], "mode": "rational" | "float"}``.  Rationals travel as
strings ``"p/q"`` (or ``"p"``), so exact inputs survive serialization.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .measure import FLOAT, MODES, RATIONAL, DiscreteMeasure, canonicalize

SCHEMA = "w2lab/1"


def scalar_to_json(x):
    """Fractions become ``"p/q"`` strings, everything else a JSON number."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def array_to_json(arr):
    return [array_to_json(a) for a in arr] if np.ndim(arr) else scalar_to_json(arr)


def _rational_literal(v):
    # exact inputs: integers, "p/q" or decimal strings; JSON floats are refused
    if isinstance(v, bool) or isinstance(v, float):
        raise InvalidInput(f"rational mode needs exact literals (int or \"p/q\" string), got {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational literal: {v!r}") from exc
    raise InvalidInput(f"cannot interpret {v!r} as a number")


def _float_literal(v):
    if isinstance(v, bool):
        raise InvalidInput(f"boolean is not a number: {v!r}")
    if isinstance(v, str):
        v = float(_rational_literal(v))
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidInput(f"invalid number {v!r}")
    return float(v)


def measure_from_json(doc: dict, mode: str | None = None) -> DiscreteMeasure:
    """Parse a measure document; ``mode`` overrides the document's own mode."""
    if not isinstance(doc, dict) or "points" not in doc:
        raise InvalidInput("measure document needs a 'points' field")
    mode = mode or doc.get("mode", RATIONAL)
    if mode not in MODES:
        raise InvalidInput(f"unknown mode {mode!r}")
    lit = _rational_literal if mode == RATIONAL else _float_literal
    points = [[lit(c) for c in (p if isinstance(p, list) else [p])] for p in doc["points"]]
    weights = doc.get("weights")
    weights = None if weights is None else [lit(w) for w in weights]
    mu = canonicalize(points, weights, mode=mode)
    if "dimension" in doc and int(doc["dimension"]) != mu.dim:
        raise DimensionMismatch(f"declared dimension {doc['dimension']} but points have {mu.dim}")
    return mu


def measure_to_json(mu: DiscreteMeasure) -> dict:
    return {
        "dimension": mu.dim,
        "points": array_to_json(mu.points),
        "weights": array_to_json(mu.weights),
        "mode": mu.mode,
    }


def load_json(path_or_text: str):
    """Read JSON from a file path, or parse it directly when it looks inline."""
    text = path_or_text.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(path_or_text).read_text()
        except OSError as exc:
            raise InvalidInput(f"cannot read {path_or_text}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON in {path_or_text[:60]}: {exc.msg}") from exc


def load_measure(path_or_text: str, mode: str | None = None) -> DiscreteMeasure:
    return measure_from_json(load_json(path_or_text), mode)


def matrix_from_json(rows, mode: str) -> np.ndarray:
    lit = _rational_literal if mode == RATIONAL else _float_literal
    M = [[lit(v) for v in row] for row in rows]
    return np.array(M, dtype=object if mode == RATIONAL else float)


def dumps(doc: dict) -> str:
    """Schema-stamped, deterministic JSON text."""
    return json.dumps({"schema": SCHEMA, **doc}, indent=2)


__all__ = [
    "SCHEMA", "scalar_to_json", "array_to_json", "measure_from_json", "measure_to_json",
    "load_json", "load_measure", "matrix_from_json", "dumps", "FLOAT", "RATIONAL",
]
