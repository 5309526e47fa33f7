"""Small linear programs in standard form ``min c.x  s.t.  A x = b, x >= 0``.

Two back ends share one result type:

* :func:`simplex_exact` -- dense two-phase tableau simplex over
  :class:`~fractions.Fraction` with Bland's rule (terminates under
  degeneracy).  On infeasible problems it returns a Farkas vector ``y``
  with ``A.T @ y <= 0`` and ``b @ y > 0``.
* :func:`linprog_float` -- thin wrapper over :func:`scipy.optimize.linprog`
  (HiGHS dual simplex, so optimal solutions are basic).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    objective: object = None
    duals: np.ndarray | None = None  # equality-row multipliers at the optimum
    farkas: np.ndarray | None = None  # infeasibility certificate (exact back end only)

    @property
    def success(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    def __init__(self, A, b):
        self.m, self.n = len(A), len(A[0]) if A else 0
        self.sign = [1 if bi >= 0 else -1 for bi in b]
        rows = []
        for i in range(self.m):
            s = self.sign[i]
            art = [Fraction(0)] * self.m
            art[i] = Fraction(1)
            rows.append([s * Fraction(a) for a in A[i]] + art + [s * Fraction(b[i])])
        self.rows = rows
        self.basis = [self.n + i for i in range(self.m)]
        self.alive = [True] * self.m
        self.ncols = self.n + self.m

    def pivot(self, r, j):
        row = self.rows[r]
        p = row[j]
        if p != 1:
            row = [v / p for v in row]
            self.rows[r] = row
        for k in range(self.m):
            if k == r or not self.alive[k]:
                continue
            f = self.rows[k][j]
            if f != 0:
                self.rows[k] = [a - f * c for a, c in zip(self.rows[k], row)]
        self.basis[r] = j

    def reduced_costs(self, cost):
        # r_j = c_j - sum_i c_B(i) T_ij, over all columns incl. artificial
        red = list(cost)
        rhs = Fraction(0)
        for i in range(self.m):
            if not self.alive[i]:
                continue
            cb = cost[self.basis[i]]
            if cb != 0:
                row = self.rows[i]
                for j in range(self.ncols):
                    if row[j] != 0:
                        red[j] -= cb * row[j]
                rhs += cb * row[-1]
        return red, rhs

    def run(self, cost, allowed):
        """Bland's-rule simplex on the current basis; returns OPTIMAL or UNBOUNDED."""
        while True:
            red, _ = self.reduced_costs(cost)
            enter = next((j for j in range(self.ncols) if allowed[j] and red[j] < 0), None)
            if enter is None:
                return OPTIMAL
            best = None
            for i in range(self.m):
                if not self.alive[i]:
                    continue
                a = self.rows[i][enter]
                if a > 0:
                    ratio = self.rows[i][-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], enter)

    def solution(self):
        x = [Fraction(0)] * self.n
        for i in range(self.m):
            if self.alive[i] and self.basis[i] < self.n:
                x[self.basis[i]] = self.rows[i][-1]
        return x

    def row_duals(self, cost):
        red, _ = self.reduced_costs(cost)
        # artificial column i is e_i in the sign-normalized system
        return [self.sign[i] * (cost[self.n + i] - red[self.n + i]) for i in range(self.m)]


def simplex_exact(c, A_eq, b_eq) -> LPResult:
    """Exact two-phase simplex for ``min c.x, A x = b, x >= 0``."""
    A = [list(row) for row in A_eq]
    b = list(b_eq)
    c = [Fraction(v) for v in c]
    nvar = len(c)
    if not A:
        if any(v < 0 for v in c):
            return LPResult(UNBOUNDED)
        return LPResult(OPTIMAL, x=_obj_array([Fraction(0)] * nvar), objective=Fraction(0),
                        duals=_obj_array([]))
    tab = _Tableau(A, b)

    phase1 = [Fraction(0)] * nvar + [Fraction(1)] * tab.m
    tab.run(phase1, [True] * tab.ncols)
    _, value = tab.reduced_costs(phase1)
    if value > 0:
        return LPResult(INFEASIBLE, farkas=_obj_array(tab.row_duals(phase1)))

    # drive zero-level artificials out of the basis; rows with no pivot are redundant
    for i in range(tab.m):
        if tab.basis[i] >= nvar:
            j = next((j for j in range(nvar) if tab.rows[i][j] != 0), None)
            if j is None:
                tab.alive[i] = False
            else:
                tab.pivot(i, j)

    phase2 = c + [Fraction(0)] * tab.m
    allowed = [True] * nvar + [False] * tab.m
    status = tab.run(phase2, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    x = tab.solution()
    obj = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return LPResult(OPTIMAL, x=_obj_array(x), objective=obj, duals=_obj_array(tab.row_duals(phase2)))


def linprog_float(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, bounds=(0, None)) -> LPResult:
    res = linprog(np.asarray(c, dtype=float),
                  A_ub=None if A_ub is None else np.asarray(A_ub, dtype=float),
                  b_ub=None if b_ub is None else np.asarray(b_ub, dtype=float),
                  A_eq=None if A_eq is None else np.asarray(A_eq, dtype=float),
                  b_eq=None if b_eq is None else np.asarray(b_eq, dtype=float),
                  bounds=bounds, method="highs-ds")
    if res.status == 2:
        return LPResult(INFEASIBLE)
    if res.status == 3:
        return LPResult(UNBOUNDED)
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    duals = None
    if A_eq is not None and getattr(res, "eqlin", None) is not None:
        duals = np.asarray(res.eqlin.marginals)
    return LPResult(OPTIMAL, x=np.asarray(res.x), objective=float(res.fun), duals=duals)


def _obj_array(values) -> np.ndarray:
    out = np.empty(len(values), dtype=object)
    for k, v in enumerate(values):
        out[k] = v
    return out
