"""Quadratic-cost optimal transport between discrete measures.

:func:`solve_w2` returns the optimal value W2^2, an optimal vertex coupling
and Kantorovich potentials certifying it.  The remaining functions probe the
optimal face ``{pi in Pi(mu, nu) : cost(pi) = W2^2}``:

* :func:`face_coordinate_range` -- min / max of one entry over the face (LP);
* :func:`enumerate_optimal_vertices` -- all vertices of the face;
* :func:`certify_structure` -- decides whether the face is a single coupling
  given by a map, and otherwise exhibits an optimal coupling whose
  conditional variance is positive.

The optimal face equals the transport polytope restricted to the cells of
zero reduced cost for any optimal dual pair, so uniqueness and vertex
enumeration walk that restricted polytope along alternating cycles.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lp
from ._network import Basis, adjacent_vertices, is_forest, network_simplex
from .coupling import Coupling, conditional_variance, cost_matrix
from .errors import CertificateFailure, InfeasibleFace, InvalidInput, TooLarge
from .measure import RATIONAL, DiscreteMeasure, check_compatible

# relative slack on the cost-equality row in float mode
FACE_SLACK = 1e-9
# flows below this are treated as zero in float mode
FLOW_TOL = 1e-13
MAX_ENUMERATION_ATOMS = 12


@dataclass(frozen=True, eq=False)
class DualCertificate:
    """Potentials with u_i + v_j <= |x_i - y_j|^2."""

    u: np.ndarray
    v: np.ndarray

    def value(self, mu: DiscreteMeasure, nu: DiscreteMeasure):
        val = self.u @ mu.weights + self.v @ nu.weights
        return val if mu.mode == RATIONAL else float(val)

    def max_violation(self, mu: DiscreteMeasure, nu: DiscreteMeasure):
        """max_ij (u_i + v_j - c_ij), clipped at 0."""
        slack = self.u[:, None] + self.v[None, :] - cost_matrix(mu, nu)
        worst = slack.max()
        return worst if worst > 0 else 0 * worst


@dataclass(frozen=True, eq=False)
class W2Solution:
    w2_squared: object
    coupling: Coupling
    dual: DualCertificate
    basis: Basis = field(repr=False)

    def __iter__(self):
        # unpacks as (w2_squared, coupling, dual)
        yield self.w2_squared
        yield self.coupling
        yield self.dual

    def zero_reduced_cost(self) -> np.ndarray:
        """Cells whose reduced cost vanishes; the optimal face lives on them."""
        mu, nu = self.coupling.source, self.coupling.target
        R = cost_matrix(mu, nu) - self.dual.u[:, None] - self.dual.v[None, :]
        if mu.mode == RATIONAL:
            return R == 0
        return np.abs(R) <= _float_tol(self.w2_squared, cost_matrix(mu, nu))


def _float_tol(w2, C) -> float:
    return FACE_SLACK * (1.0 + max(abs(float(w2)), float(np.max(C))))


def solve_w2(mu: DiscreteMeasure, nu: DiscreteMeasure) -> W2Solution:
    """Squared quadratic Wasserstein distance with primal and dual certificates.

    Raises ``DimensionMismatch`` / ``ModeMismatch`` for incompatible inputs.
    In rational mode the duality gap is verified to be exactly zero; in float
    mode it must be below ``1e-9 (1 + |cost|)``.
    """
    check_compatible(mu, nu)
    C = cost_matrix(mu, nu)
    tol = 0.0 if mu.mode == RATIONAL else 1e-12 * (1.0 + float(np.max(C)))
    X, basis, u, v = network_simplex(C, mu.weights, nu.weights, tol=tol)
    pi = Coupling(X, mu, nu)
    cost = pi.cost()
    dual = DualCertificate(u, v)
    gap = cost - dual.value(mu, nu)
    viol = dual.max_violation(mu, nu)
    if mu.mode == RATIONAL:
        if gap != 0 or viol != 0:
            raise CertificateFailure(f"duality gap {gap}, dual violation {viol}")
    else:
        bound = 1e-9 * (1.0 + abs(cost))
        if abs(gap) > bound or viol > bound:
            raise CertificateFailure(f"duality gap {gap:.3e}, dual violation {viol:.3e}")
    return W2Solution(cost, pi, dual, basis)


def w2_squared(mu: DiscreteMeasure, nu: DiscreteMeasure):
    return solve_w2(mu, nu).w2_squared


def w2(mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
    """W2 distance as a float (square root of the certified W2^2)."""
    return float(np.sqrt(max(float(solve_w2(mu, nu).w2_squared), 0.0)))


# ----------------------------------------------------------------------------
# face probing by linear programming


def _transport_constraints(mu, nu):
    n, m = mu.n, nu.n
    A = np.zeros((n + m, n * m), dtype=int)
    for i in range(n):
        A[i, i * m:(i + 1) * m] = 1
    for j in range(m):
        A[n + j, j::m] = 1
    b = list(mu.weights) + list(nu.weights)
    return A, b


def face_coordinate_range(mu: DiscreteMeasure, nu: DiscreteMeasure, w2, cell):
    """``(lo, hi)`` of ``pi[cell]`` over couplings with cost equal to ``w2``.

    Two LPs over Pi(mu, nu) with the cost row appended.  Raises
    :class:`InfeasibleFace` when ``w2`` is below the true optimum.
    """
    check_compatible(mu, nu)
    i, j = cell
    if not (0 <= i < mu.n and 0 <= j < nu.n):
        raise InvalidInput(f"cell {cell} out of range")
    C = cost_matrix(mu, nu)
    A, b = _transport_constraints(mu, nu)
    k = i * nu.n + j
    out = []
    if mu.mode == RATIONAL:
        w2 = Fraction(w2)
        A_eq = [list(row) for row in A] + [list(C.reshape(-1))]
        b_eq = b + [w2]
        for sign in (1, -1):
            c = [0] * (mu.n * nu.n)
            c[k] = sign
            res = lp.simplex_exact(c, A_eq, b_eq)
            if not res.success:
                raise InfeasibleFace(f"no coupling of cost {w2}")
            out.append(sign * res.objective)
    else:
        bound = float(w2) + FACE_SLACK * (1.0 + abs(float(w2)))
        for sign in (1, -1):
            c = np.zeros(mu.n * nu.n)
            c[k] = sign
            res = lp.linprog_float(c, A_eq=A, b_eq=np.asarray(b, dtype=float),
                                   A_ub=C.reshape(1, -1), b_ub=[bound])
            if not res.success:
                raise InfeasibleFace(f"no coupling of cost <= {bound}")
            out.append(sign * res.objective)
    return out[0], out[1]


# ----------------------------------------------------------------------------
# vertex walking on the optimal face


def _flow_tol(mode):
    return 0.0 if mode == RATIONAL else FLOW_TOL


def _vertex_key(X, mode):
    if mode == RATIONAL:
        return tuple(X.reshape(-1))
    return tuple(np.round(X.reshape(-1).astype(float), 12))


def enumerate_optimal_vertices(mu: DiscreteMeasure, nu: DiscreteMeasure, solution: W2Solution | None = None) -> list:
    """All vertices of the optimal face, in breadth-first order from the solver's vertex.

    Guarded to ``n + m <= 12`` (raises :class:`TooLarge`).
    """
    if mu.n + nu.n > MAX_ENUMERATION_ATOMS:
        raise TooLarge(f"{mu.n} + {nu.n} atoms exceeds the enumeration guard {MAX_ENUMERATION_ATOMS}")
    sol = solution or solve_w2(mu, nu)
    Z = sol.zero_reduced_cost()
    tol = _flow_tol(mu.mode)
    start = sol.coupling.matrix.copy()
    seen = {_vertex_key(start, mu.mode)}
    order = [start]
    queue = [start]
    while queue:
        X = queue.pop(0)
        for Y in adjacent_vertices(X, Z, tol):
            key = _vertex_key(Y, mu.mode)
            if key not in seen:
                seen.add(key)
                order.append(Y)
                queue.append(Y)
    return [Coupling(X, mu, nu) for X in order]


def face_dimension(vertices) -> int:
    """Affine dimension of the convex hull of the given couplings."""
    if len(vertices) <= 1:
        return 0
    base = vertices[0].matrix.reshape(-1)
    D = np.array([v.matrix.reshape(-1) - base for v in vertices[1:]])
    if vertices[0].mode == RATIONAL:
        return _exact_rank(D)
    return int(np.linalg.matrix_rank(D.astype(float), tol=1e-9))


def _exact_rank(M) -> int:
    rows = [list(r) for r in M]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / p[c]
                rows[r] = [a - f * b for a, b in zip(rows[r], p)]
        rank += 1
    return rank


def other_optimal_vertex(solution: W2Solution):
    """An optimal vertex different from the solver's, or ``None`` if the face is a point."""
    mode = solution.coupling.mode
    Z = solution.zero_reduced_cost()
    n = Z.shape[0]
    cells = [tuple(int(t) for t in c) for c in np.argwhere(Z)]
    if is_forest(cells, n):
        return None
    return next(adjacent_vertices(solution.coupling.matrix, Z, _flow_tol(mode)), None)


@dataclass(frozen=True, eq=False)
class StructureCertificate:
    """Verdict on the optimal face.

    ``unique and is_map`` is the case where the only optimal coupling is
    ``(I, T) # mu``; otherwise ``witness_coupling`` is optimal and has
    positive ``conditional_variance``.
    """

    w2_squared: object
    unique: bool
    is_map: bool
    map: np.ndarray | None
    conditional_variance: object
    witness_coupling: Coupling
    vertices: tuple = ()

    @property
    def singleton_map(self) -> bool:
        return self.unique and self.is_map


def certify_structure(mu: DiscreteMeasure, nu: DiscreteMeasure, solution: W2Solution | None = None) -> StructureCertificate:
    sol = solution or solve_w2(mu, nu)
    pi = sol.coupling
    tol = _flow_tol(mu.mode)
    other = other_optimal_vertex(sol)
    unique = other is None
    if unique:
        witness = pi
        is_map = pi.is_map(tol)
        vertices = (pi,)
    else:
        second = Coupling(other, mu, nu)
        witness = Coupling((pi.matrix + other) / 2, mu, nu)
        is_map = False
        vertices = (pi, second)
    cv = conditional_variance(witness)
    if not (unique and is_map):
        if not cv > (0 if mu.mode == RATIONAL else 1e-15):
            raise CertificateFailure("optimal coupling without a map has zero conditional variance")
    images = pi.map_images(tol) if is_map else None
    return StructureCertificate(sol.w2_squared, unique, is_map, images, cv, witness, vertices)
