"""Selection of extremal barycentric images by convex minimization.

For a strictly convex ``phi`` the minimizer ``eta_phi`` of ``int phi d eta``
over the barycentric images of optimal couplings is reached at some ``pi`` on
the optimal face, and the optimal coupling between ``mu`` and ``eta_phi`` is
then the map ``T(x_i) = b_i``.  With ``b_i = (pi_i . Y) / mu_i`` the objective

    G(pi) = sum_i mu_i phi(b_i)

is a convex quadratic in ``pi`` when ``phi(x) = x.A x + b.x``, and
``dG/dpi_ij = (2 A b_i + b) . y_j``.  It is minimized by Frank-Wolfe over the
face: the linear oracle is the network simplex with pricing restricted to
cells of zero reduced cost, each step is an exact line search along the
better of the FW and away directions, and the iterate is then re-optimized
over the convex hull of its active vertices (a small simplex QP solved by an
active-set method).  All computations run in double precision.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._network import Basis, is_forest, network_simplex
from .coupling import Coupling
from .errors import CertificateFailure, FWStalled, InvalidInput, NotStrictlyConvex
from .measure import DiscreteMeasure, check_compatible, push_forward, same_measure, to_fraction
from .transport import W2Solution, certify_structure, solve_w2

MAX_FW_STEPS = 100_000
# stop once the FW gap falls below this (relative to 1 + |G|)
GAP_TARGET = 1e-12
# the contract: a gap above this at the step cap raises FWStalled
GAP_REQUIRED = 1e-8
TIE_BREAK_LAMBDA = 1e-6
# barycenters closer than this are merged into one atom of eta
BARYCENTER_MERGE_TOL = 1e-9
# eta's compared within this in minimal_element_probe
ATOM_MATCH_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class ConvexObjective:
    """phi(x) = x.A x + b.x with ``A`` symmetric positive definite."""

    A: np.ndarray
    b: np.ndarray
    name: str = "quadratic"

    def __call__(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        return np.einsum("ki,ij,kj->k", X, self.A, X) + X @ self.b

    def gradient(self, points) -> np.ndarray:
        X = np.atleast_2d(np.asarray(points, dtype=float))
        return 2.0 * X @ self.A + self.b[None, :]

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def regularized(self, lam: float) -> "ConvexObjective":
        """phi + lam |x|^2."""
        return ConvexObjective(self.A + lam * np.eye(self.dim), self.b, f"{self.name}+{lam:g}|x|^2")


def quadratic(A, b=None, name: str = "quadratic") -> ConvexObjective:
    """Validate and wrap ``x.A x + b.x``; raises :class:`NotStrictlyConvex` unless ``A`` is SPD."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[0]
    if A.shape != (d, d):
        raise InvalidInput(f"A must be square, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12 * (1 + np.abs(A).max())):
        raise NotStrictlyConvex("A is not symmetric")
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        raise NotStrictlyConvex("A is not positive definite") from None
    b = np.zeros(d) if b is None else np.asarray(b, dtype=float).reshape(-1)
    if b.shape != (d,):
        raise InvalidInput(f"b must have length {d}")
    return ConvexObjective((A + A.T) / 2, b, name)


def norm_sq(d: int) -> ConvexObjective:
    return ConvexObjective(np.eye(d), np.zeros(d), "norm_sq")


def objective_from_spec(spec: dict, d: int) -> ConvexObjective:
    """``{"builtin": "norm_sq"}`` or ``{"A": [[...]], "b": [...]}``."""
    if spec.get("builtin") == "norm_sq":
        return norm_sq(d)
    if "builtin" in spec:
        raise InvalidInput(f"unknown builtin objective {spec['builtin']!r}")
    if "A" not in spec:
        raise InvalidInput("objective needs 'A' or 'builtin'")
    phi = quadratic([[float(to_fraction(v)) for v in row] for row in spec["A"]],
                    None if spec.get("b") is None else [float(to_fraction(v)) for v in spec["b"]])
    if phi.dim != d:
        raise InvalidInput(f"objective dimension {phi.dim} differs from measure dimension {d}")
    return phi


@dataclass(frozen=True, eq=False)
class EtaResult:
    eta: DiscreteMeasure
    coupling: Coupling
    map: np.ndarray
    fw_gap: float
    objective: float
    steps: int
    history: tuple = field(default=(), repr=False)


class _Face:
    """Optimal face of (mu, nu) seen as the transport polytope on the cells ``Z``."""

    def __init__(self, sol: W2Solution):
        pi = sol.coupling
        self.mu, self.nu = pi.source.to_float(), pi.target.to_float()
        self.w = self.mu.weights
        self.Y = self.nu.points
        Z = np.array(sol.zero_reduced_cost(), dtype=bool)
        for c in sol.basis.cells:
            Z[c] = True
        self.Z = Z
        self.basis = Basis(list(sol.basis.cells), {c: float(x) for c, x in sol.basis.values.items()})
        self.start = pi.matrix.astype(float)
        cells = [tuple(int(t) for t in c) for c in np.argwhere(Z)]
        self.single_point = is_forest(cells, Z.shape[0])

    def barycenters(self, P):
        return (P @ self.Y) / self.w[:, None]

    def lmo(self, grad):
        C = np.where(self.Z, grad, 0.0)
        tol = 1e-14 * (1.0 + np.abs(C).max())
        X, basis, _, _ = network_simplex(C, self.w, self.nu.weights, basis=self.basis, allowed=self.Z, tol=tol)
        self.basis = basis
        X[X < 0] = 0.0
        return X


def _qp_terms(Bs, w, phi):
    """H, c with G(sum_k a_k B_k) = a.H a + c.a for barycenter stacks ``Bs``."""
    BA = np.einsum("kid,de->kie", Bs, phi.A)
    H = np.einsum("kie,lie,i->kl", BA, Bs, w)
    c = np.einsum("kid,d,i->k", Bs, phi.b, w)
    return (H + H.T) / 2, c


def _simplex_qp(H, c, alpha, max_iter=1000):
    """Active-set minimization of a.H a + c.a over the probability simplex, from ``alpha``."""
    k = len(c)
    a = alpha.copy()
    S = set(np.flatnonzero(a > 0))
    val = a @ H @ a + c @ a
    for _ in range(max_iter):
        idx = sorted(S)
        s = len(idx)
        K = np.zeros((s + 1, s + 1))
        K[:s, :s] = 2 * H[np.ix_(idx, idx)]
        K[:s, s] = 1
        K[s, :s] = 1
        rhs = np.concatenate([-c[idx], [1.0]])
        sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
        target = np.zeros(k)
        target[idx] = sol[:s]
        if np.all(target[idx] >= -1e-15):
            target = np.clip(target, 0, None)
            target /= target.sum()
            tval = target @ H @ target + c @ target
            if tval <= val + 1e-15 * (1 + abs(val)):
                a, val = target, tval
            g = 2 * H @ a + c
            lam = g[idx].min()
            out = [j for j in range(k) if j not in S and g[j] < lam - 1e-13 * (1 + abs(lam))]
            if not out:
                break
            S.add(min(out, key=lambda j: g[j]))
            continue
        # blocked: step toward target until an active weight hits zero
        d = target - a
        neg = [j for j in idx if d[j] < 0]
        steps = [a[j] / -d[j] for j in neg]
        t = min(steps)
        a = np.clip(a + t * d, 0, None)
        drop = neg[int(np.argmin(steps))]
        a[drop] = 0.0
        a /= a.sum()
        val = a @ H @ a + c @ a
        S = set(np.flatnonzero(a > 0))
    return a, val


def _key(X):
    return np.round(X, 12).tobytes()


def minimize_phi_over_face(mu: DiscreteMeasure, nu: DiscreteMeasure, phi: ConvexObjective,
                           solution: W2Solution | None = None, max_steps: int = MAX_FW_STEPS,
                           certify: bool = True) -> EtaResult:
    """Minimize ``sum_i mu_i phi(b_i(pi))`` over optimal couplings ``pi``.

    Returns ``eta_phi`` (merged barycenters), the minimizing coupling, the map
    ``T = b`` and the final FW gap.  With ``certify`` the optimal coupling
    between ``mu`` and ``eta_phi`` is checked to be a single map.
    """
    check_compatible(mu, nu)
    if phi.dim != mu.dim:
        raise InvalidInput(f"objective dimension {phi.dim} differs from measure dimension {mu.dim}")
    sol = solution or solve_w2(mu, nu)
    face = _Face(sol)
    w = face.w

    def G(B):
        return float(w @ phi(B))

    X = face.start
    history = [G(face.barycenters(X))]
    gap = 0.0
    steps = 0
    if not face.single_point:
        verts = [X]
        keys = {_key(X): 0}
        alpha = np.array([1.0])
        for steps in range(1, max_steps + 1):
            B = face.barycenters(X)
            grad = phi.gradient(B) @ face.Y.T
            V = face.lmo(grad)
            gap = float(np.sum(grad * (X - V)))
            if gap <= GAP_TARGET * (1.0 + abs(history[-1])):
                break
            kv = _key(V)
            if kv not in keys:
                keys[kv] = len(verts)
                verts.append(V)
                alpha = np.append(alpha, 0.0)
            Bs = np.stack([face.barycenters(Vk) for Vk in verts])
            H, c = _qp_terms(Bs, w, phi)
            # exact line search along the better of the FW and away directions
            g = 2 * H @ alpha + c
            fw = np.zeros_like(alpha)
            fw[keys[kv]] = 1.0
            act = np.flatnonzero(alpha > 0)
            away = act[np.argmax(g[act])]
            d_fw = fw - alpha
            d_aw = alpha.copy()
            d_aw[away] -= 1.0
            if g @ d_fw <= g @ d_aw or alpha[away] >= 1.0:
                d, tmax = d_fw, 1.0
            else:
                d, tmax = d_aw, alpha[away] / (1.0 - alpha[away])
            curv = d @ H @ d
            t = tmax if curv <= 0 else min(tmax, max(0.0, -(g @ d) / (2 * curv)))
            alpha = np.clip(alpha + t * d, 0, None)
            alpha /= alpha.sum()
            # fully corrective polish over the active vertices
            alpha, _ = _simplex_qp(H, c, alpha)
            keep = np.flatnonzero(alpha > 1e-15)
            verts = [verts[k] for k in keep]
            alpha = alpha[keep] / alpha[keep].sum()
            keys = {_key(Vk): k for k, Vk in enumerate(verts)}
            X = np.tensordot(alpha, np.stack(verts), axes=1)
            history.append(G(face.barycenters(X)))
        else:
            if gap > GAP_REQUIRED * (1.0 + abs(history[-1])):
                raise FWStalled(f"FW gap {gap:.3e} after {max_steps} steps")
    T = face.barycenters(X)
    eta = push_forward(face.mu, [list(r) for r in T], tol=BARYCENTER_MERGE_TOL)
    pi = Coupling(X, face.mu, face.nu)
    if certify and not certify_structure(face.mu, eta).singleton_map:
        raise CertificateFailure("optimal coupling between mu and eta_phi is not a single map")
    return EtaResult(eta, pi, T, max(gap, 0.0), history[-1], steps, tuple(history))


def underline_eta(mu: DiscreteMeasure, nu: DiscreteMeasure, **kw) -> EtaResult:
    """The W2-projection of ``mu`` on I(mu, nu): ``phi = |x|^2``."""
    return minimize_phi_over_face(mu, nu, norm_sq(mu.dim), **kw)


def tie_break_eta_phi(mu: DiscreteMeasure, nu: DiscreteMeasure, phi: ConvexObjective,
                      lam: float = TIE_BREAK_LAMBDA, **kw) -> EtaResult:
    """Minimize ``G + lam sum_i mu_i |b_i|^2``, a regularized stand-in for the
    second-moment tie-break among minimizers of ``G``."""
    return minimize_phi_over_face(mu, nu, phi.regularized(lam), **kw)


@dataclass(frozen=True, eq=False)
class ProbeResult:
    all_equal: bool
    etas: tuple
    candidate: DiscreteMeasure | None = None
    counterexample: tuple | None = None  # (index_a, index_b)


def _eta_match(a: DiscreteMeasure, b: DiscreteMeasure, tol: float) -> bool:
    return same_measure(a, b, tol=tol)


def minimal_element_probe(mu: DiscreteMeasure, nu: DiscreteMeasure, family, tol: float = ATOM_MATCH_TOL) -> ProbeResult:
    """Compute ``eta_phi`` across ``family``.

    If they all coincide (atoms and weights within ``tol``) the candidate
    minimal element is ``underline_eta``; otherwise the first pair of
    distinct results is reported.
    """
    sol = solve_w2(mu, nu)
    etas = tuple(minimize_phi_over_face(mu, nu, phi, solution=sol).eta for phi in family)
    for a in range(len(etas)):
        for b in range(a + 1, len(etas)):
            if not _eta_match(etas[a], etas[b], tol):
                return ProbeResult(False, etas, counterexample=(a, b))
    return ProbeResult(True, etas, candidate=underline_eta(mu, nu, solution=sol).eta)


def second_example_objective(p: float) -> ConvexObjective:
    """phi_p(x) = x_1^2 + (x_2 - 2 p x_1)^2."""
    return quadratic([[1 + 4 * p * p, -2 * p], [-2 * p, 1]], name=f"phi_{p:g}")


__all__ = [
    "ConvexObjective", "quadratic", "norm_sq", "objective_from_spec", "EtaResult",
    "minimize_phi_over_face", "underline_eta", "tie_break_eta_phi", "ProbeResult",
    "minimal_element_probe", "second_example_objective",
]
