"""Decomposition of an optimal coupling through its barycentric image.

For an optimal ``pi`` with barycentric image ``eta = T # mu``,

    W2^2(mu, nu) = W2^2(mu, eta) + M2(nu) - M2(eta),

so the transport splits into the optimal map ``T`` and a martingale kernel
from ``eta`` to ``nu``.  ``I(mu, nu)`` collects the measures ``eta <=cx nu``
for which this identity holds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .convex_order import convex_order_test
from .coupling import Coupling, barycentric_projection, conditional_variance
from .errors import NotOptimal
from .measure import RATIONAL, DiscreteMeasure, check_compatible, same_measure, second_moment
from .transport import solve_w2

# default tolerance on the identity residual in float mode
RESIDUAL_TOL = 1e-8


def identity_residual(mu: DiscreteMeasure, nu: DiscreteMeasure, eta: DiscreteMeasure, w2_mu_nu=None):
    """``W2^2(mu, nu) - W2^2(mu, eta) - M2(nu) + M2(eta)``."""
    if w2_mu_nu is None:
        w2_mu_nu = solve_w2(mu, nu).w2_squared
    return w2_mu_nu - solve_w2(mu, eta).w2_squared - second_moment(nu) + second_moment(eta)


def check_optimal(pi: Coupling):
    """Solve the transport problem and verify ``pi`` against its dual certificate.

    Returns the solution.  Raises :class:`NotOptimal` when ``pi`` charges a
    cell of positive reduced cost or its cost exceeds the optimum.
    """
    sol = solve_w2(pi.source, pi.target)
    Z = sol.zero_reduced_cost()
    if pi.mode == RATIONAL:
        bad = np.any((pi.matrix != 0) & ~Z) or pi.cost() != sol.w2_squared
    else:
        slack = 1e-9 * (1.0 + abs(sol.w2_squared))
        bad = np.any((pi.matrix > 1e-12) & ~Z) or pi.cost() > sol.w2_squared + slack
    if bad:
        raise NotOptimal(f"coupling of cost {pi.cost()} is not optimal (W2^2 = {sol.w2_squared})")
    return sol


@dataclass(frozen=True, eq=False)
class Decomposition:
    eta: DiscreteMeasure
    map: np.ndarray
    conditional_variance: object
    residual: object


def decompose(pi: Coupling) -> Decomposition:
    """Barycentric image, map, conditional variance and identity residual of an optimal ``pi``."""
    sol = check_optimal(pi)
    T, eta = barycentric_projection(pi)
    res = identity_residual(pi.source, pi.target, eta, sol.w2_squared)
    return Decomposition(eta, T, conditional_variance(pi), res)


def decomposition_residual(mu: DiscreteMeasure, nu: DiscreteMeasure, pi: Coupling):
    """Residual of the decomposition identity for the barycentric image of ``pi``.

    Zero (exactly in rational mode) whenever ``pi`` is optimal; a non-optimal
    ``pi`` raises :class:`NotOptimal`.
    """
    check_compatible(mu, nu)
    if not (_same(pi.source, mu) and _same(pi.target, nu)):
        raise NotOptimal("coupling marginals differ from (mu, nu)")
    return decompose(pi).residual


def _same(a, b):
    return same_measure(a, b, tol=0 if a.mode == RATIONAL else 1e-12)


def in_I(mu: DiscreteMeasure, nu: DiscreteMeasure, eta: DiscreteMeasure, tol: float | None = None) -> bool:
    """``eta <=cx nu`` and the decomposition identity holds within ``tol``.

    ``tol`` defaults to 0 in rational mode and ``1e-8`` in float mode.
    """
    check_compatible(mu, nu, eta)
    if tol is None:
        tol = 0 if mu.mode == RATIONAL else RESIDUAL_TOL
    if abs(identity_residual(mu, nu, eta)) > tol:
        return False
    return convex_order_test(eta, nu).ordered
