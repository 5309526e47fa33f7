"""Couplings, Markov kernels and their algebra.

A :class:`Coupling` is an ``n x m`` matrix whose rows and columns sum to the
weights of its source and target measures.  Disintegrating it gives a
:class:`Kernel` ``k`` with ``pi_ij = mu_i k_ij``; the barycentric map
``T(x_i) = sum_j k_ij y_j`` splits the coupling into the map ``T`` followed
by a martingale kernel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, SupportMismatch
from .measure import RATIONAL, DiscreteMeasure, check_compatible, push_forward

# marginal deviation accepted in float mode
MARGINAL_TOL = 1e-10


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure) -> np.ndarray:
    """Squared Euclidean distances |x_i - y_j|^2."""
    check_compatible(mu, nu)
    diff = mu.points[:, None, :] - nu.points[None, :, :]
    return (diff * diff).sum(axis=2)


@dataclass(frozen=True, eq=False)
class Coupling:
    matrix: np.ndarray
    source: DiscreteMeasure
    target: DiscreteMeasure

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def mode(self) -> str:
        return self.source.mode

    def cost(self):
        """Quadratic transport cost sum_ij pi_ij |x_i - y_j|^2."""
        return _sum(self.matrix * cost_matrix(self.source, self.target), self.mode)

    def marginal_error(self):
        rows = self.matrix.sum(axis=1) - self.source.weights
        cols = self.matrix.sum(axis=0) - self.target.weights
        return max(max(abs(r) for r in rows), max(abs(c) for c in cols))

    def support(self, tol: float = 0.0) -> np.ndarray:
        return self.matrix > tol

    def is_map(self, tol: float = 0.0) -> bool:
        """True when every row has exactly one positive entry."""
        return bool(np.all(self.support(tol).sum(axis=1) == 1))

    def map_images(self, tol: float = 0.0) -> np.ndarray:
        """Target point of each row (only meaningful when :meth:`is_map`)."""
        cols = np.argmax(self.matrix > tol, axis=1)
        return self.target.points[cols]


def make_coupling(matrix, source: DiscreteMeasure, target: DiscreteMeasure, check: bool = True) -> Coupling:
    check_compatible(source, target)
    M = np.array(matrix, dtype=object if source.mode == RATIONAL else float)
    if M.shape != (source.n, target.n):
        raise InvalidInput(f"matrix shape {M.shape} does not match ({source.n}, {target.n})")
    if check:
        if np.any(M < 0):
            raise InvalidInput("coupling entries must be nonnegative")
        pi = Coupling(M, source, target)
        err = pi.marginal_error()
        limit = 0 if source.mode == RATIONAL else MARGINAL_TOL
        if err > limit:
            raise InvalidInput(f"marginals violated by {float(err):.3e}")
        return pi
    return Coupling(M, source, target)


def identity_coupling(mu: DiscreteMeasure) -> Coupling:
    M = np.zeros((mu.n, mu.n), dtype=mu.weights.dtype)
    if mu.mode == RATIONAL:
        M[...] = 0 * mu.weights[0]
    for i in range(mu.n):
        M[i, i] = mu.weights[i]
    return Coupling(M, mu, mu)


def product_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Coupling:
    check_compatible(mu, nu)
    return Coupling(np.outer(mu.weights, nu.weights), mu, nu)


@dataclass(frozen=True, eq=False)
class Kernel:
    """Row-stochastic matrix from the atoms of ``source`` to ``target_points``."""

    rows: np.ndarray
    source: DiscreteMeasure
    target_points: np.ndarray

    def coupling(self) -> Coupling:
        """The coupling ``mu_i k_ij``; target atoms receiving no mass are dropped."""
        M = self.source.weights[:, None] * self.rows
        col = M.sum(axis=0)
        keep = np.flatnonzero(col > 0)
        target = DiscreteMeasure(self.target_points[keep].copy(), col[keep].copy(), self.source.mode)
        return Coupling(M[:, keep].copy(), self.source, target)


def disintegrate(pi: Coupling) -> Kernel:
    return Kernel(pi.matrix / pi.source.weights[:, None], pi.source, pi.target.points)


def barycentric_map(pi: Coupling) -> np.ndarray:
    """Conditional means T(x_i) = sum_j k_ij y_j, one row per source atom."""
    return (pi.matrix @ pi.target.points) / pi.source.weights[:, None]


def barycentric_projection(pi: Coupling, tol: float | None = None):
    """``(T, eta)``: the barycentric map and the image measure ``T # mu``."""
    T = barycentric_map(pi)
    kw = {} if tol is None else {"tol": tol}
    return T, push_forward(pi.source, [list(r) for r in T], **kw)


def conditional_variance(pi: Coupling):
    """sum_ij pi_ij |y_j - T(x_i)|^2; zero exactly for map couplings."""
    T = barycentric_map(pi)
    diff = pi.target.points[None, :, :] - T[:, None, :]
    return _sum(pi.matrix * (diff * diff).sum(axis=2), pi.mode)


def compose(q: Kernel, m: Kernel, tol: float = 1e-12) -> Coupling:
    """Coupling ``mu(dx) (qm)(x, dy)`` from kernels mu -> eta and eta -> nu."""
    if q.target_points.shape != m.source.points.shape:
        raise SupportMismatch("target support of q differs from source atoms of m")
    if q.source.mode == RATIONAL:
        same = bool(np.all(q.target_points == m.source.points))
    else:
        same = bool(np.abs(q.target_points.astype(float) - m.source.points.astype(float)).max() <= tol)
    if not same:
        raise SupportMismatch("target support of q differs from source atoms of m")
    qm = Kernel(q.rows @ m.rows, q.source, m.target_points)
    return qm.coupling()


def is_martingale_coupling(pi: Coupling, tol: float = 1e-9) -> bool:
    """Every row's conditional mean equals its source atom."""
    resid = barycentric_map(pi) - pi.source.points
    if pi.mode == RATIONAL:
        return bool(np.all(resid == 0))
    return bool(np.abs(resid.astype(float)).max() <= tol)


def _sum(arr, mode):
    total = arr.sum()
    return total if mode == RATIONAL else float(total)
