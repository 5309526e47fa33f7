"""One-dimensional closed forms.

Everything is computed from the cumulative breakpoints of the two measures:
on each cell of the merged partition of (0, 1] both quantile functions are
constant, so integrals against Lebesgue measure on (0, 1] are finite sums.
"""
from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coupling import Coupling, is_martingale_coupling
from .errors import MartingaleViolation, WrongDimension
from .measure import RATIONAL, DiscreteMeasure, canonicalize, check_compatible, push_forward

# breakpoints closer than this are identified in float mode
BREAK_TOL = 1e-12


@dataclass(frozen=True)
class QuantileFunction:
    """Left-continuous quantile function: ``values[j]`` on ``(breaks[j], breaks[j+1]]``."""

    breaks: tuple
    values: tuple

    def __call__(self, u):
        if u <= self.breaks[0]:
            return self.values[0]
        k = bisect_left(self.breaks, u, lo=1)
        return self.values[min(k, len(self.values)) - 1]

    def to_measure(self, mode: str = RATIONAL) -> DiscreteMeasure:
        w = [b - a for a, b in zip(self.breaks[:-1], self.breaks[1:])]
        return canonicalize([[v] for v in self.values], w, mode=mode)


def _require_1d(*measures):
    for m in measures:
        if m.dim != 1:
            raise WrongDimension(f"expected a measure on R, got dimension {m.dim}")


def quantile_of(mu: DiscreteMeasure) -> QuantileFunction:
    _require_1d(mu)
    cum = [0 * mu.weights[0]]
    for w in mu.weights:
        cum.append(cum[-1] + w)
    cum[-1] = Fraction(1) if mu.mode == RATIONAL else 1.0
    return QuantileFunction(tuple(cum), tuple(mu.points[:, 0]))


def _merged_cells(mu, nu):
    """Cells ``(length, i, j)`` of the merged partition, with the atom index of each side."""
    qa, qb = quantile_of(mu), quantile_of(nu)
    tol = 0 if mu.mode == RATIONAL else BREAK_TOL
    merged = sorted(set(qa.breaks) | set(qb.breaks))
    pts = [merged[0]]
    for c in merged[1:]:
        if c - pts[-1] > tol:
            pts.append(c)
    pts[-1] = qa.breaks[-1]
    cells = []
    for s, t in zip(pts[:-1], pts[1:]):
        mid = (s + t) / 2
        i = bisect_left(qa.breaks, mid, lo=1) - 1
        j = bisect_left(qb.breaks, mid, lo=1) - 1
        cells.append((t - s, i, j))
    return cells


def comonotone_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Coupling:
    """Image of Lebesgue measure on (0, 1] under the two quantile functions."""
    _require_1d(mu, nu)
    check_compatible(mu, nu)
    M = np.zeros((mu.n, nu.n), dtype=mu.weights.dtype)
    if mu.mode == RATIONAL:
        M[...] = Fraction(0)
    for length, i, j in _merged_cells(mu, nu):
        M[i, j] += length
    return Coupling(M, mu, nu)


def w2_squared_1d(mu: DiscreteMeasure, nu: DiscreteMeasure):
    """Integral over (0, 1) of (F_mu^{-1} - F_nu^{-1})^2."""
    _require_1d(mu, nu)
    check_compatible(mu, nu)
    x, y = mu.points[:, 0], nu.points[:, 0]
    total = 0 * mu.weights[0]
    for length, i, j in _merged_cells(mu, nu):
        total += length * (x[i] - y[j]) ** 2
    return total if mu.mode == RATIONAL else float(total)


@dataclass(frozen=True)
class MapExistence:
    exists: bool
    map: tuple | None = None  # T(x_i) for each atom of mu
    violating_atom: object = None


def map_exists_1d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> MapExistence:
    """Is the (unique) optimal coupling given by a map?

    True iff, for every atom x of ``mu``, no cumulative break of ``nu`` lies
    strictly inside ``(F_mu(x-), F_mu(x))``; the map is then
    ``F_nu^{-1}(F_mu(x))``.
    """
    _require_1d(mu, nu)
    check_compatible(mu, nu)
    qa, qb = quantile_of(mu), quantile_of(nu)
    tol = 0 if mu.mode == RATIONAL else BREAK_TOL
    inner = qb.breaks[1:-1]
    for i in range(mu.n):
        lo, hi = qa.breaks[i], qa.breaks[i + 1]
        k = bisect_right(inner, lo + tol)
        if k < len(inner) and inner[k] < hi - tol:
            return MapExistence(False, violating_atom=mu.points[i, 0])
    images = []
    for i in range(mu.n):
        u = qa.breaks[i + 1]
        # a nu-break within tol of u counts as u itself
        k = bisect_left(qb.breaks, u - tol, lo=1)
        images.append(qb.values[min(k, nu.n) - 1])
    return MapExistence(True, map=tuple(images))


def barycentric_map_1d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """Average of F_nu^{-1} over each atom's cell ``(F_mu(x-), F_mu(x)]``."""
    _require_1d(mu, nu)
    check_compatible(mu, nu)
    y = nu.points[:, 0]
    acc = [0 * mu.weights[0]] * mu.n
    for length, i, j in _merged_cells(mu, nu):
        acc[i] = acc[i] + length * y[j]
    out = np.empty(mu.n, dtype=mu.weights.dtype)
    for i in range(mu.n):
        out[i] = acc[i] / mu.weights[i]
    return out


def barycentric_image_1d(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiscreteMeasure:
    T = barycentric_map_1d(mu, nu)
    return push_forward(mu, [[t] for t in T])


def martingale_coupling_1d(mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-9) -> Coupling:
    """The unique martingale coupling between ``T # mu`` and ``nu``.

    It is the comonotone coupling of the two; the martingale property is
    re-verified row by row and a failure raises :class:`MartingaleViolation`.
    """
    eta = barycentric_image_1d(mu, nu)
    pi = comonotone_coupling(eta, nu)
    if not is_martingale_coupling(pi, tol):
        raise MartingaleViolation("comonotone coupling of (T#mu, nu) is not a martingale")
    return pi
