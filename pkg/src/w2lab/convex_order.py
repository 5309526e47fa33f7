"""Convex order between discrete measures.

``eta <=cx nu`` is decided through Strassen's theorem: it holds iff some
coupling of ``eta`` and ``nu`` is a martingale, which for finitely supported
marginals is a finite LP feasibility problem with kernel support on the atoms
of ``nu``.  When the LP is infeasible its Farkas multipliers ``(f, g, h)``
satisfy ``f_x + g_y + h_x.(y - x) <= 0`` and ``sum f eta + sum g nu > 0``, so
``phi(z) = max_x f_x + h_x.(z - x)`` is a convex piecewise-linear function
with ``int phi d eta > int phi d nu``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp
from .coupling import Kernel
from .errors import InvalidInput
from .measure import RATIONAL, DiscreteMeasure, check_compatible, mean

# residual accepted on the kernel constraints in float mode
FEASIBILITY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class SeparatingFunction:
    """phi(z) = max_k (intercepts[k] + slopes[k] . z)."""

    slopes: np.ndarray
    intercepts: np.ndarray

    def __call__(self, points) -> np.ndarray:
        vals = np.asarray(points) @ self.slopes.T + self.intercepts[None, :]
        return vals.max(axis=1)

    def gap(self, eta: DiscreteMeasure, nu: DiscreteMeasure):
        """int phi d eta - int phi d nu (positive for a valid witness)."""
        return self(eta.points) @ eta.weights - self(nu.points) @ nu.weights


@dataclass(frozen=True, eq=False)
class ConvexOrderResult:
    ordered: bool
    kernel: Kernel | None = None
    witness: SeparatingFunction | None = None


def _constraints(eta, nu):
    n, m, d = eta.n, nu.n, eta.dim
    rows, rhs = [], []
    zero = 0 * eta.weights[0]
    for i in range(n):
        r = [0] * (n * m)
        for j in range(m):
            r[i * m + j] = 1
        rows.append(r)
        rhs.append(eta.weights[i])
    for j in range(m):
        r = [0] * (n * m)
        for i in range(n):
            r[i * m + j] = 1
        rows.append(r)
        rhs.append(nu.weights[j])
    for i in range(n):
        for k in range(d):
            r = [zero] * (n * m)
            for j in range(m):
                r[i * m + j] = nu.points[j, k] - eta.points[i, k]
            rows.append(r)
            rhs.append(zero)
    return rows, rhs


def _witness_from_multipliers(eta, f, h):
    slopes = h.reshape(eta.n, eta.dim)
    intercepts = f - (slopes * eta.points).sum(axis=1)
    return SeparatingFunction(slopes, intercepts)


def convex_order_test(eta: DiscreteMeasure, nu: DiscreteMeasure) -> ConvexOrderResult:
    """Decide ``eta <=cx nu``; returns a martingale kernel or a separating convex function."""
    check_compatible(eta, nu)
    n, m, d = eta.n, nu.n, eta.dim
    rows, rhs = _constraints(eta, nu)
    if eta.mode == RATIONAL:
        res = lp.simplex_exact([0] * (n * m), rows, rhs)
        if res.success:
            P = res.x.reshape(n, m)
            return ConvexOrderResult(True, kernel=Kernel(P / eta.weights[:, None], eta, nu.points))
        y = res.farkas
        wit = _witness_from_multipliers(eta, y[:n], y[n + m:])
        if not wit.gap(eta, nu) > 0:
            raise InvalidInput("Farkas certificate failed to separate")  # pragma: no cover
        return ConvexOrderResult(False, witness=wit)

    A = np.array(rows, dtype=float)
    b = np.array(rhs, dtype=float)
    res = lp.linprog_float(np.zeros(n * m), A_eq=A, b_eq=b)
    if res.success:
        P = np.clip(res.x, 0.0, None)
        if np.abs(A @ P - b).max() <= FEASIBILITY_TOL:
            return ConvexOrderResult(True, kernel=Kernel(P.reshape(n, m) / eta.weights[:, None], eta, nu.points))
    # separating function from the box-normalized dual
    nv = n + m + n * d
    c = -np.concatenate([eta.weights, nu.weights, np.zeros(n * d)])
    res_d = lp.linprog_float(c, A_ub=A.T, b_ub=np.zeros(n * m), bounds=(-1, 1))
    y = res_d.x
    wit = _witness_from_multipliers(eta, y[:n], y[n + m:nv])
    if not wit.gap(eta, nu) > 0:
        # infeasible only up to tolerance: report as ordered without kernel
        return ConvexOrderResult(True, kernel=None)
    return ConvexOrderResult(False, witness=wit)


def convex_order_1d(eta: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-9) -> bool:
    """Equal means and ``int (x - t)^+ d eta <= int (x - t)^+ d nu`` at every atom ``t``."""
    from .quantile import _require_1d

    _require_1d(eta, nu)
    check_compatible(eta, nu)
    exact = eta.mode == RATIONAL
    slack = 0 if exact else tol
    if abs(mean(eta)[0] - mean(nu)[0]) > slack:
        return False
    x, y = eta.points[:, 0], nu.points[:, 0]
    for t in list(x) + list(y):
        ce = sum(w * (xi - t) for xi, w in zip(x, eta.weights) if xi > t)
        cn = sum(w * (yi - t) for yi, w in zip(y, nu.weights) if yi > t)
        if ce > cn + slack:
            return False
    return True


def is_martingale(k: Kernel, eta: DiscreteMeasure, tol: float = 1e-9) -> bool:
    """Each row of ``k`` is a probability vector with barycenter equal to its atom."""
    if k.rows.shape[0] != eta.n:
        raise InvalidInput("kernel rows do not match the atoms of eta")
    rows = k.rows
    sums = rows.sum(axis=1)
    bary = rows @ k.target_points
    if eta.mode == RATIONAL:
        return bool(np.all(rows >= 0) and np.all(sums == 1) and np.all(bary == eta.points))
    return bool(np.all(rows >= -tol) and np.abs(sums - 1).max() <= tol
                and np.abs(bary - eta.points).max() <= tol)
