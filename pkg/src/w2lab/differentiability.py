"""Differentiability of ``sigma -> W2^2(sigma, nu)`` at a discrete ``mu``.

The lifted functional ``X -> W2^2(law(X), nu)`` is Frechet differentiable at
``X ~ mu`` iff the optimal coupling is unique and given by a map ``T``; the
derivative is then ``2 (X - T(X))``.  Otherwise an optimal coupling ``pi``
with kernel ``k`` has positive conditional variance ``V``, and moving mass
along ``xi = Y - E[Y|X]`` gives

    W2^2(law(X + t xi), nu) <= W2^2(mu, nu) - (2t - t^2) V,

a first-order decrease with zero first-order term ``E[(X - T(X)).xi]``.

Perturbations are realized as atom splittings along a coupling: the law of
``X + t xi`` puts mass ``pi_ij`` at ``x_i + t xi_ij``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .coupling import Coupling, barycentric_map, conditional_variance
from .errors import CertificateFailure, DiracTarget, InvalidInput, NotDifferentiable, NotEnoughPoints
from .measure import RATIONAL, DiscreteMeasure, canonicalize, check_compatible, convert, to_fraction
from .transport import StructureCertificate, certify_structure, solve_w2

# minimum log-log slope accepted as superlinear decay of the remainder
ORDER_THRESHOLD = 1.5
# float slack on the decrease inequality
DECREASE_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class DiffCertificate:
    differentiable: bool
    derivative: np.ndarray | None  # 2 (x_i - T(x_i)), one row per atom
    witness: Coupling | None
    xi_norm_sq: object  # conditional variance of the witness (0 when differentiable)
    structure: StructureCertificate


def diff_certificate(mu: DiscreteMeasure, nu: DiscreteMeasure) -> DiffCertificate:
    cert = certify_structure(mu, nu)
    if cert.singleton_map:
        return DiffCertificate(True, 2 * (mu.points - cert.map), None, cert.conditional_variance, cert)
    return DiffCertificate(False, None, cert.witness_coupling, cert.conditional_variance, cert)


@dataclass(frozen=True, eq=False)
class PerturbedMeasure:
    t: object
    measure: DiscreteMeasure


def _split(mu, P, shifts, t):
    """Law of ``x_i + t shifts[i, j]`` under the cell masses ``P``."""
    pts, wts = [], []
    for i, j in np.argwhere(P > 0):
        pts.append(list(mu.points[i] + t * shifts[i, j]))
        wts.append(P[i, j])
    return canonicalize(pts, wts, mode=mu.mode)


def _conditional_residuals(pi: Coupling):
    """``y_j - T(x_i)`` for every cell, shape (n, m, d)."""
    T = barycentric_map(pi)
    return pi.target.points[None, :, :] - T[:, None, :]


def perturbed_measure(mu: DiscreteMeasure, nu: DiscreteMeasure, pi: Coupling, t) -> PerturbedMeasure:
    """``sum_ij pi_ij delta_{x_i + t (y_j - T(x_i))}`` with ``T`` the barycentric map of ``pi``."""
    check_compatible(mu, nu)
    t = convert(t, mu.mode)
    if not 0 <= t <= 1:
        raise InvalidInput(f"t must lie in [0, 1], got {t}")
    return PerturbedMeasure(t, _split(mu, pi.matrix, _conditional_residuals(pi), t))


@dataclass(frozen=True, eq=False)
class DecreaseReport:
    V: object
    rows: tuple  # (t, W2^2(mu_t, nu), bound, bound - W2^2(mu_t, nu))
    rate: float  # (W2^2(mu, nu) - W2^2(mu_t, nu)) / t at the smallest t
    passed: bool


def nondiff_decrease_check(mu: DiscreteMeasure, nu: DiscreteMeasure, pi: Coupling, t_list) -> DecreaseReport:
    """Check ``W2^2(mu_t, nu) <= W2^2(mu, nu) - (2t - t^2) V`` along ``xi = Y - E[Y|X]``.

    ``pi`` should be optimal.  ``passed`` requires ``V > 0``; a violated
    inequality with ``V > 0`` raises :class:`CertificateFailure`.
    """
    V = conditional_variance(pi)
    base = solve_w2(mu, nu).w2_squared
    exact = mu.mode == RATIONAL
    rows = []
    for t in t_list:
        t = convert(t, mu.mode)
        if not 0 < t <= 1:
            raise InvalidInput(f"t must lie in (0, 1], got {t}")
        wt = solve_w2(perturbed_measure(mu, nu, pi, t).measure, nu).w2_squared
        bound = base - (2 * t - t * t) * V
        rows.append((t, wt, bound, bound - wt))
    positive = V > (0 if exact else DECREASE_SLACK)
    slack = 0 if exact else DECREASE_SLACK * (1 + abs(float(base)))
    holds = all(r[3] >= -slack for r in rows)
    if positive and not holds:
        raise CertificateFailure("decrease inequality violated along the conditional residual")
    t_min = min(rows, key=lambda r: r[0])
    rate = float((base - t_min[1]) / t_min[0])
    return DecreaseReport(V, tuple(rows), rate, bool(positive and holds))


@dataclass(frozen=True, eq=False)
class FDReport:
    t: tuple
    residuals: tuple
    fitted_order: float
    differentiable: bool

    @property
    def superlinear(self) -> bool:
        return self.fitted_order >= ORDER_THRESHOLD


def fitted_order(ts, residuals, floor: float = 0.0) -> float:
    """Least-squares slope of log residual against log t; ``inf`` when the residuals vanish."""
    pairs = [(float(t), float(r)) for t, r in zip(ts, residuals) if float(r) > floor]
    if len(pairs) < 2:
        return float("inf")
    lt, lr = np.log([p[0] for p in pairs]), np.log([p[1] for p in pairs])
    return float(np.polyfit(lt, lr, 1)[0])


def fd_derivative_check(mu: DiscreteMeasure, nu: DiscreteMeasure, directions, t_list,
                        coupling: Coupling | None = None, require_differentiable: bool = True) -> FDReport:
    """Finite-difference check of the derivative ``2 (x - T(x))``.

    ``directions`` is either one vector per atom of ``mu`` (shape (n, d)) or,
    with a ``coupling``, one vector per cell (shape (n, m, d)) describing a
    lifted perturbation that splits atoms along the coupling.  The residual
    at ``t`` is ``|W2^2(law(X + t xi), nu) - W2^2(mu, nu) - 2t E[(X - T(X)).xi]|``
    with ``T`` the barycentric map of the (optimal) coupling.

    Raises :class:`NotDifferentiable` when ``require_differentiable`` and the
    optimal coupling is not a single map.
    """
    check_compatible(mu, nu)
    cert = diff_certificate(mu, nu)
    if require_differentiable and not cert.differentiable:
        raise NotDifferentiable("optimal coupling is not a unique map")
    pi = coupling if coupling is not None else cert.structure.witness_coupling
    mode = mu.mode
    D = np.asarray(directions, dtype=object if mode == RATIONAL else float)
    if mode == RATIONAL:
        D = np.vectorize(to_fraction, otypes=[object])(D)
    n, m, d = mu.n, nu.n, mu.dim
    if D.shape == (n, d):
        # per-atom directions: carried by every cell of the row
        D = np.broadcast_to(D[:, None, :], (n, m, d))
    elif D.shape != (n, m, d):
        raise InvalidInput(f"directions must have shape ({n}, {d}) or ({n}, {m}, {d}), got {D.shape}")
    T = barycentric_map(pi)
    P = pi.matrix
    first = (P[:, :, None] * (mu.points - T)[:, None, :] * D).sum()
    base = solve_w2(mu, nu).w2_squared
    ts, res = [], []
    for t in t_list:
        t = convert(t, mode)
        wt = solve_w2(_split(mu, P, D, t), nu).w2_squared
        r = wt - base - 2 * t * first
        ts.append(t)
        res.append(abs(r))
    floor = 0.0 if mode == RATIONAL else 1e-13 * (1 + abs(float(base)))
    return FDReport(tuple(ts), tuple(res), fitted_order(ts, res, floor), cert.differentiable)


def split_direction(pi: Coupling) -> np.ndarray:
    """Lifted direction ``xi = Y - E[Y|X]`` on the cells of ``pi``."""
    return _conditional_residuals(pi)


# ----------------------------------------------------------------------------
# prime-size empirical measures


@dataclass(frozen=True, eq=False)
class PrimeDemoReport:
    rows: tuple  # (p, mass_feasible, optimal_is_map)
    feasible_primes: tuple


def _is_dirac(nu: DiscreteMeasure) -> bool:
    return nu.n == 1


def ball_jitter(count: int, d: int, seed: int = 0) -> np.ndarray:
    """Deterministic points in the closed unit ball (scrambled Halton, rescaled)."""
    H = qmc.Halton(d=d, scramble=True, seed=seed).random(count)
    return (2 * H - 1) / np.sqrt(d)


def prime_perturbation_demo(sample_points, nu: DiscreteMeasure, primes, seed: int = 0,
                            check_optimal_map: bool = True) -> PrimeDemoReport:
    """Build ``mu_p = (1/p) sum_{i<=p} delta_{x_i + y_i / p}`` for each prime ``p``.

    A transport map ``mu_p -> nu`` needs every weight of ``nu`` to be a
    multiple of ``1/p``; the report lists which primes pass.  With
    ``check_optimal_map`` the optimal coupling of ``mu_p`` and ``nu`` is also
    certified (float mode) as a map or not.
    """
    if _is_dirac(nu):
        raise DiracTarget("target is a Dirac mass; every measure is mapped onto it")
    X = np.asarray(sample_points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    primes = sorted(int(p) for p in primes)
    if primes and X.shape[0] < primes[-1]:
        raise NotEnoughPoints(f"need {primes[-1]} sample points, got {X.shape[0]}")
    if X.shape[1] != nu.dim:
        raise InvalidInput(f"sample points have dimension {X.shape[1]}, target {nu.dim}")
    weights = [to_fraction(w) for w in nu.weights]
    Y = ball_jitter(max(primes, default=0), nu.dim, seed)
    nu_f = nu.to_float()
    rows = []
    for p in primes:
        pts = X[:p] + Y[:p] / p
        if len({tuple(r) for r in pts}) < p:
            raise InvalidInput(f"jittered points coincide for p = {p}")
        feasible = all((w * p).denominator == 1 for w in weights)
        is_map = None
        if check_optimal_map:
            mu_p = canonicalize(pts, [1.0] * p, mode="float")
            is_map = certify_structure(mu_p, nu_f).singleton_map
        rows.append((p, feasible, is_map))
    return PrimeDemoReport(tuple(rows), tuple(r[0] for r in rows if r[1]))


def primes_up_to(n: int) -> list:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for k in range(2, int(n ** 0.5) + 1):
        if sieve[k]:
            sieve[k * k::k] = False
    return [int(k) for k in np.flatnonzero(sieve)]


__all__ = [
    "DiffCertificate", "diff_certificate", "PerturbedMeasure", "perturbed_measure",
    "DecreaseReport", "nondiff_decrease_check", "FDReport", "fd_derivative_check",
    "fitted_order", "split_direction", "PrimeDemoReport", "prime_perturbation_demo",
    "ball_jitter", "primes_up_to", "ORDER_THRESHOLD",
]
