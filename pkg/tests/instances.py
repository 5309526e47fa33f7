"""Random instance generators and independent oracles shared by the tests."""
from fractions import Fraction
from itertools import combinations, permutations
from math import factorial

import numpy as np
from scipy.optimize import linprog

from w2lab import canonicalize
from w2lab._network import network_simplex
from w2lab.measure import RATIONAL


def rational_measure(rng, n, d, grid=3, wmax=4):
    """Up to ``n`` atoms on the integer grid [-grid, grid]^d, small integer weights."""
    pts = rng.integers(-grid, grid + 1, size=(n, d)).tolist()
    wts = rng.integers(1, wmax + 1, size=n).tolist()
    return canonicalize(pts, wts, mode=RATIONAL)


def rational_pair(rng, nmax=6, dmax=3, grid=3):
    d = int(rng.integers(1, dmax + 1))
    n, m = rng.integers(1, nmax + 1, size=2)
    return rational_measure(rng, int(n), d, grid), rational_measure(rng, int(m), d, grid)


def random_coupling_matrix(rng, mu, nu, den=6):
    """Random rational coupling: a vertex (optimal for a random integer cost) mixed with the product coupling."""
    C = np.array(rng.integers(0, 5, size=(mu.n, nu.n)).tolist(), dtype=object) * Fraction(1)
    X, *_ = network_simplex(C, mu.weights, nu.weights)
    lam = Fraction(int(rng.integers(0, den + 1)), den)
    return lam * X + (1 - lam) * np.outer(mu.weights, nu.weights)


def w2_linprog(mu, nu):
    """Dense HiGHS transport LP; independent of the network simplex."""
    x = mu.points.astype(float)
    y = nu.points.astype(float)
    C = ((x[:, None, :] - y[None, :, :]) ** 2).sum(axis=2)
    n, m = C.shape
    A = np.zeros((n + m, n * m))
    for i in range(n):
        A[i, i * m:(i + 1) * m] = 1
    for j in range(m):
        A[n + j, j::m] = 1
    b = np.concatenate([mu.weights.astype(float), nu.weights.astype(float)])
    res = linprog(C.reshape(-1), A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def w2_permutations(x, y):
    """Brute force over permutation couplings of equal-weight measures with n atoms."""
    n = len(x)
    best, argbest = None, []
    for perm in permutations(range(n)):
        cost = sum(Fraction(sum((a - b) ** 2 for a, b in zip(x[i], y[perm[i]]))) for i in range(n)) / n
        if best is None or cost < best:
            best, argbest = cost, [perm]
        elif cost == best:
            argbest.append(perm)
    return best, argbest


def grid_oracle_eta(mu, nu, phi, vertices, dim, coarse=10_000, rounds=40):
    """Minimize G over the hull of ``vertices`` by grid sampling with zoom refinement.

    Every point of a polytope of dimension ``dim`` lies in a simplex spanned
    by ``dim + 1`` of its vertices, so each such simplex is sampled with about
    ``coarse`` grid points; the best few are refined by shrinking local grids.
    Returns the barycenter matrix of the best point.
    """
    w = mu.weights.astype(float)
    Y = nu.points.astype(float)
    Bs = np.stack([(V.matrix.astype(float) @ Y) / w[:, None] for V in vertices])
    k = dim + 1

    def G(alphas, idx):
        B = np.tensordot(alphas, Bs[list(idx)], axes=1)  # (N, n, d)
        vals = np.einsum("Nid,de,Nie->Ni", B, phi.A, B) + B @ phi.b
        return vals @ w

    if len(vertices) <= k:
        subsets = [tuple(range(len(vertices)))]
    else:
        subsets = list(combinations(range(len(vertices)), k))
    candidates = []
    for idx in subsets:
        s = len(idx)
        res = max(2, int(round((coarse * factorial(s - 1)) ** (1.0 / max(s - 1, 1)))))
        pts = _simplex_grid(s, res)
        vals = G(pts, idx)
        j = int(np.argmin(vals))
        candidates.append((vals[j], idx, pts[j], 1.0 / res))
    candidates.sort(key=lambda c: c[0])
    best_val, best_idx, best_pt = candidates[0][:3]
    for val, idx, pt, h in candidates[:5]:
        s = len(idx)
        offsets = np.array(np.meshgrid(*[np.linspace(-1, 1, 5)] * s)).reshape(s, -1).T
        for _ in range(rounds):
            trial = pt[None, :] + h * offsets
            trial = np.clip(trial, 0, None)
            trial = trial[trial.sum(axis=1) > 0]
            trial /= trial.sum(axis=1, keepdims=True)
            vals = G(trial, idx)
            j = int(np.argmin(vals))
            if vals[j] <= val:
                val, pt = vals[j], trial[j]
            h *= 0.6
        if val < best_val:
            best_val, best_idx, best_pt = val, idx, pt
    B = np.tensordot(best_pt, Bs[list(best_idx)], axes=1)
    return best_val, B


def _simplex_grid(s, res):
    """All points of the simplex in R^s with coordinates in (1/res) Z."""
    if s == 1:
        return np.ones((1, 1))
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + [left])
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, slots - 1)

    rec([], res, s)
    return np.array(out, dtype=float) / res


def random_spd(rng, d):
    M = rng.normal(size=(d, d))
    return M.T @ M + 0.2 * np.eye(d)
