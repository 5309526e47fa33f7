"""Finitely supported probability measures on R^d.

A measure lives in one of two numeric modes:

* ``"rational"`` -- coordinates and weights are :class:`fractions.Fraction`
  stored in numpy ``object`` arrays, so every functional is exact;
* ``"float"`` -- plain ``float64`` arrays.

Measures are canonical: zero-weight atoms dropped, coinciding atoms merged,
weights summing to one, atoms sorted lexicographically.
"""
from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyMeasure, InvalidInput, ModeMismatch

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)

# coordinates closer than this (max-norm) are merged in float mode
MERGE_TOL = 1e-12


def to_fraction(x) -> Fraction:
    """Convert ``x`` to an exact rational.

    Floats are read through their shortest decimal representation, so
    ``0.3`` becomes ``3/10`` rather than the binary expansion.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise InvalidInput(f"boolean is not a number: {x!r}")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"not a rational literal: {x!r}") from exc
    if isinstance(x, numbers.Real):
        xf = float(x)
        if not math.isfinite(xf):
            raise InvalidInput(f"non-finite value {x!r}")
        return Fraction(repr(xf))
    raise InvalidInput(f"cannot interpret {x!r} as a number")


def to_float(x) -> float:
    if isinstance(x, str):
        x = to_fraction(x)
    try:
        xf = float(x)
    except (TypeError, ValueError) as exc:
        raise InvalidInput(f"cannot interpret {x!r} as a number") from exc
    if not math.isfinite(xf):
        raise InvalidInput(f"non-finite value {x!r}")
    return xf


def convert(x, mode: str):
    return to_fraction(x) if mode == RATIONAL else to_float(x)


def as_array(values, mode: str) -> np.ndarray:
    """Array of ``values`` converted to ``mode`` (object array of Fractions or float64)."""
    arr = np.asarray(values, dtype=object)
    if mode == RATIONAL:
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for k, v in enumerate(arr.reshape(-1)):
            flat[k] = to_fraction(v)
        return out
    return np.vectorize(to_float, otypes=[float])(arr) if arr.size else arr.astype(float)


def zero(mode: str):
    return Fraction(0) if mode == RATIONAL else 0.0


def infer_mode(*collections) -> str:
    """``"float"`` if any entry is a float, else ``"rational"``."""
    for coll in collections:
        for v in np.asarray(coll, dtype=object).reshape(-1):
            if isinstance(v, (float, np.floating)):
                return FLOAT
    return RATIONAL


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Canonical finitely supported probability measure.

    Build instances with :func:`canonicalize` (or :func:`measure`); the
    constructor trusts its arguments.
    """

    points: np.ndarray  # (n, d)
    weights: np.ndarray  # (n,)
    mode: str

    def __post_init__(self):
        self.points.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def atoms(self):
        """Iterate over ``(point_tuple, weight)`` pairs."""
        for x, w in zip(self.points, self.weights):
            yield tuple(x), w

    def to_float(self) -> "DiscreteMeasure":
        if self.mode == FLOAT:
            return self
        return canonicalize(self.points.astype(float), self.weights.astype(float), mode=FLOAT)

    def to_rational(self) -> "DiscreteMeasure":
        if self.mode == RATIONAL:
            return self
        return canonicalize(self.points, self.weights, mode=RATIONAL)

    def __repr__(self):
        body = ", ".join(f"{_fmt_point(x)}: {w}" for x, w in self.atoms())
        return f"DiscreteMeasure[{self.mode}, d={self.dim}]{{{body}}}"


def _fmt_point(x) -> str:
    return "(" + ",".join(str(c) for c in x) + ")"


def _as_point_rows(raw_points) -> list:
    rows = []
    dim = None
    for p in raw_points:
        if isinstance(p, (str, numbers.Number)):
            row = [p]
        else:
            row = list(p)
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise DimensionMismatch(f"point {row!r} has dimension {len(row)}, expected {dim}")
        rows.append(row)
    if dim == 0:
        raise DimensionMismatch("points must have dimension >= 1")
    return rows


def canonicalize(raw_points, raw_weights=None, mode: str | None = None, tol: float = MERGE_TOL) -> DiscreteMeasure:
    """Canonical measure from raw atoms.

    Zero-weight atoms are dropped, duplicates merged (within ``tol`` in float
    mode, exactly in rational mode), weights renormalized, atoms sorted
    lexicographically.  Scalars given as points are read as 1-d points.
    ``raw_weights=None`` means equal weights.
    """
    rows = _as_point_rows(raw_points)
    if not rows:
        raise EmptyMeasure("no atoms")
    if raw_weights is None:
        raw_weights = [1] * len(rows)
    raw_weights = list(raw_weights)
    if len(raw_weights) != len(rows):
        raise InvalidInput(f"{len(rows)} points but {len(raw_weights)} weights")
    if mode is None:
        mode = infer_mode(rows, raw_weights)
    if mode not in MODES:
        raise InvalidInput(f"unknown mode {mode!r}")

    pts = [tuple(convert(c, mode) for c in row) for row in rows]
    wts = [convert(w, mode) for w in raw_weights]
    if any(w < 0 for w in wts):
        raise InvalidInput("weights must be nonnegative")
    keep = [(p, w) for p, w in zip(pts, wts) if w > 0]
    if not keep:
        raise EmptyMeasure("all weights are zero")
    keep.sort(key=lambda pw: pw[0])

    if mode == RATIONAL:
        merged: dict = {}
        for p, w in keep:
            merged[p] = merged.get(p, Fraction(0)) + w
        items = sorted(merged.items())
    else:
        items = _merge_close(keep, tol)

    total = sum(w for _, w in items)
    dim = len(items[0][0])
    if mode == RATIONAL:
        points = np.empty((len(items), dim), dtype=object)
        for i, (p, _) in enumerate(items):
            points[i, :] = p
        weights = np.array([w / total for _, w in items], dtype=object)
    else:
        points = np.array([p for p, _ in items], dtype=float).reshape(len(items), dim)
        weights = np.array([w for _, w in items], dtype=float) / total
    return DiscreteMeasure(points, weights, mode)


def _merge_close(sorted_atoms, tol):
    # atoms are sorted lexicographically, so candidates share a first
    # coordinate within tol of the current one
    reps: list = []
    for p, w in sorted_atoms:
        hit = None
        for k in range(len(reps) - 1, -1, -1):
            q = reps[k][0]
            if q[0] < p[0] - tol:
                break
            if max(abs(a - b) for a, b in zip(p, q)) <= tol:
                hit = k
                break
        if hit is None:
            reps.append([p, w])
        else:
            reps[hit][1] += w
    return [(p, w) for p, w in reps]


def measure(points, weights=None, mode: str | None = None, tol: float = MERGE_TOL) -> DiscreteMeasure:
    """Shorthand for :func:`canonicalize`."""
    return canonicalize(points, weights, mode=mode, tol=tol)


def dirac(point, mode: str = RATIONAL) -> DiscreteMeasure:
    return canonicalize([point], [1], mode=mode)


def check_compatible(*measures: DiscreteMeasure) -> None:
    """Raise unless all measures share numeric mode and dimension."""
    first = measures[0]
    for m in measures[1:]:
        if m.mode != first.mode:
            raise ModeMismatch(f"cannot mix {first.mode} and {m.mode} measures")
        if m.dim != first.dim:
            raise DimensionMismatch(f"dimensions {first.dim} and {m.dim} differ")


def second_moment(mu: DiscreteMeasure):
    """Sum of w_i |x_i|^2."""
    sq = (mu.points * mu.points).sum(axis=1)
    return _scalar(np.dot(mu.weights, sq), mu.mode)


def mean(mu: DiscreteMeasure) -> np.ndarray:
    return mu.weights @ mu.points


def push_forward(mu: DiscreteMeasure, images, tol: float = MERGE_TOL) -> DiscreteMeasure:
    """Image measure of ``mu`` under the map ``x_i -> images[i]``."""
    rows = _as_point_rows(images)
    if len(rows) != mu.n:
        raise DimensionMismatch(f"need one image per atom ({mu.n}), got {len(rows)}")
    return canonicalize(rows, list(mu.weights), mode=mu.mode, tol=tol)


def mixture(measures: Sequence[DiscreteMeasure], coeffs: Iterable) -> DiscreteMeasure:
    """Convex combination sum_k c_k measures[k]."""
    check_compatible(*measures)
    mode = measures[0].mode
    pts, wts = [], []
    for m, c in zip(measures, coeffs):
        c = convert(c, mode)
        for x, w in m.atoms():
            pts.append(x)
            wts.append(c * w)
    return canonicalize(pts, wts, mode=mode)


def same_measure(a: DiscreteMeasure, b: DiscreteMeasure, tol: float = 0.0) -> bool:
    """Atom-by-atom equality (exact when ``tol == 0``)."""
    if a.dim != b.dim or a.n != b.n:
        return False
    if tol == 0:
        return bool(np.all(a.points == b.points) and np.all(a.weights == b.weights))
    dp = np.abs(a.points.astype(float) - b.points.astype(float)).max()
    dw = np.abs(a.weights.astype(float) - b.weights.astype(float)).max()
    return bool(dp <= tol and dw <= tol)


def _scalar(x, mode):
    return Fraction(x) if mode == RATIONAL else float(x)
