"""Reproduce the worked examples and report one check per claim."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import catalog
from .convex_order import convex_order_test
from .coupling import barycentric_projection, make_coupling
from .differentiability import prime_perturbation_demo, primes_up_to
from .eta import minimal_element_probe, minimize_phi_over_face, second_example_objective, underline_eta
from .measure import canonicalize, second_moment
from .quantile import map_exists_1d
from .transport import certify_structure, enumerate_optimal_vertices, solve_w2, w2


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _cross():
    mu, nu = catalog.cross_mu(), catalog.cross_nu()
    sol = solve_w2(mu, nu)
    cert = certify_structure(mu, nu, sol)
    verts = enumerate_optimal_vertices(mu, nu, sol)
    maps = []
    for p in (0, Fraction(1, 4), Fraction(1, 2)):
        T, _ = barycentric_projection(make_coupling(catalog.cross_kernel_coupling(p), mu, nu))
        maps.append(tuple(T[0]) == (0, 1 - 2 * p))
    ok = sol.w2_squared == 2 and not cert.unique and len(verts) == 2 and all(maps)
    return Check("cross example", ok,
                 f"W2^2={sol.w2_squared}, unique={cert.unique}, vertices={len(verts)}, T_p matches={maps}")


def _second():
    mu, nu = catalog.cross_mu(), catalog.square_nu()
    errs = []
    for p in (0, 0.3, 1):
        eta = minimize_phi_over_face(mu, nu, second_example_objective(p)).eta
        errs.append(w2(eta, catalog.eta_p(p, "float")))
    low = w2(underline_eta(mu, nu).eta, catalog.eta_p(0, "float"))
    probe = minimal_element_probe(mu, nu, [second_example_objective(p) for p in (0, 0.5, 1)])
    ok = max(errs) <= 1e-6 and low <= 1e-6 and not probe.all_equal
    return Check("square example eta_phi", ok,
                 f"max W2 error {max(errs):.1e}, underline error {low:.1e}, probe all_equal={probe.all_equal}")


def _skew():
    eta, nu = catalog.skew_eta(2), catalog.skew_nu(2)
    val = solve_w2(eta, nu).w2_squared
    mart = second_moment(nu) - second_moment(eta)
    ok = val == 7 and mart == 9
    return Check("skew example a=2", ok, f"W2^2={val}, martingale cost={mart}")


def _incomparable():
    ps = [0, Fraction(3, 10), Fraction(1, 2), 1]
    bad = []
    for p in ps:
        for q in ps:
            if p != q and convex_order_test(catalog.eta_p(p), catalog.eta_p(q)).ordered:
                bad.append((str(p), str(q)))
    return Check("eta_p incomparable", not bad, f"ordered pairs: {bad}")


def _one_dim():
    d0 = canonicalize([[0]])
    pm = canonicalize([[-1], [1]])
    r = map_exists_1d(d0, pm)
    ok = (not r.exists) and r.violating_atom == 0
    return Check("1D map criterion", ok, f"exists={r.exists}, violating atom={r.violating_atom}")


def _uniform(n: int = 200):
    mu = catalog.uniform_grid(n, 0, 1)
    nu = catalog.uniform_grid(n, 0, 2)
    proj = catalog.uniform_grid(n, Fraction(1, 2), Fraction(3, 2))
    low = underline_eta(mu, nu).eta
    err = w2(low, nu)
    ok = err <= 2e-2 and w2(mu, proj) <= w2(mu, low)
    return Check("uniform discretization", ok,
                 f"W2(underline eta, nu)={err:.2e}, W2(mu, U[1/2,3/2])={w2(mu, proj):.4f} <= W2(mu, underline eta)={w2(mu, low):.4f}")


def _primes():
    nu = canonicalize([[-1], [1]])
    primes = primes_up_to(50)
    rep = prime_perturbation_demo(np.arange(primes[-1], dtype=float)[:, None], nu, primes)
    return Check("prime demo", rep.feasible_primes == (2,), f"feasible primes {rep.feasible_primes}")


CHECKS = (_cross, _second, _skew, _incomparable, _one_dim, _uniform, _primes)


def run_suite() -> list:
    return [check() for check in CHECKS]
