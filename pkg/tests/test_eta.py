from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from w2lab import canonicalize, certify_structure, solve_w2
from w2lab.catalog import cross_mu, cross_nu, eta_p, square_nu, uniform_grid
from w2lab.coupling import barycentric_projection
from w2lab.decomposition import in_I
from w2lab.errors import FWStalled, InvalidInput, NotStrictlyConvex
from w2lab.eta import (
    minimal_element_probe,
    minimize_phi_over_face,
    norm_sq,
    objective_from_spec,
    quadratic,
    second_example_objective,
    tie_break_eta_phi,
    underline_eta,
)
from w2lab.measure import dirac, mixture, same_measure
from w2lab.transport import enumerate_optimal_vertices, w2

from instances import rational_measure, random_spd

TOL = 1e-7


def close(a, b, tol=TOL):
    return same_measure(a.to_float(), b.to_float(), tol=tol)


def test_objective_validation():
    with pytest.raises(NotStrictlyConvex):
        quadratic([[1, 0], [0, 0]])
    with pytest.raises(NotStrictlyConvex):
        quadratic([[1, 1], [0, 1]])
    with pytest.raises(NotStrictlyConvex):
        objective_from_spec({"A": [[-1]]}, 1)
    with pytest.raises(InvalidInput):
        objective_from_spec({"builtin": "cosh"}, 1)
    with pytest.raises(InvalidInput):
        objective_from_spec({"A": [[1]]}, 2)
    phi = objective_from_spec({"builtin": "norm_sq"}, 3)
    assert phi([[1, 2, 2]])[0] == 9


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    phi = quadratic(random_spd(rng, d), rng.normal(size=d))
    x = rng.normal(size=d)
    h = 1e-6
    fd = np.array([(phi([x + h * e])[0] - phi([x - h * e])[0]) / (2 * h) for e in np.eye(d)])
    g = phi.gradient([x])[0]
    assert np.linalg.norm(fd - g) <= 1e-5 * max(1.0, np.linalg.norm(g))


def test_second_example_eta_p():
    mu, nu = cross_mu(), square_nu()
    for p in (0, 0.3, 0.5, 1):
        res = minimize_phi_over_face(mu, nu, second_example_objective(p))
        assert close(res.eta, eta_p(p, "float"))
        assert res.fw_gap <= 1e-8
    assert close(underline_eta(mu, nu).eta, eta_p(0))


def test_trivial_faces():
    nu = cross_nu()
    res = underline_eta(nu, nu)
    assert close(res.eta, nu)
    assert np.allclose(res.map, nu.points.astype(float))
    mu = canonicalize([[0], [3]], [1, 2])
    assert close(underline_eta(mu, mu).eta, mu)


def test_cross_underline_is_origin():
    assert close(underline_eta(cross_mu(), cross_nu()).eta, dirac([0, 0]))


def test_uniform_discretization():
    mu, nu = uniform_grid(200, 0, 1), uniform_grid(200, 0, 2)
    low = underline_eta(mu, nu).eta
    assert w2(low, nu) <= 2e-2
    proj = uniform_grid(200, Fraction(1, 2), Fraction(3, 2))
    assert w2(mu, proj) <= w2(mu, low)


def test_tie_break_examples():
    mu, nu = cross_mu(), square_nu()
    for p in (0, 0.3, 1):
        phi = second_example_objective(p)
        a = minimize_phi_over_face(mu, nu, phi).eta
        b = tie_break_eta_phi(mu, nu, phi).eta
        assert same_measure(a, b, tol=1e-5)
    # oracle: the face of the cross example is the segment eta_q = 1/2 (delta_(0, 1-2q) + delta_(0, 2q-1))
    eps = 1e-3
    qs = np.linspace(0, 1, 100_001)
    vals = eps * (1 - 2 * qs) ** 2
    q = qs[np.argmin(vals)]
    expect = canonicalize([[0, 1 - 2 * q], [0, 2 * q - 1]], mode="float")
    got = tie_break_eta_phi(cross_mu(), cross_nu(), quadratic([[1, 0], [0, eps]])).eta
    assert w2(got, expect) <= 1e-4


def test_probe_examples():
    mu, nu = cross_mu(), square_nu()
    probe = minimal_element_probe(mu, nu, [second_example_objective(p) for p in (0, 0.5, 1)])
    assert not probe.all_equal
    a, b = probe.counterexample
    assert not same_measure(probe.etas[a], probe.etas[b], tol=1e-3)
    rng = np.random.default_rng(0)
    family = [quadratic(random_spd(rng, 1), rng.normal(size=1)) for _ in range(5)]
    umu, unu = uniform_grid(200, 0, 1), uniform_grid(200, 0, 2)
    probe = minimal_element_probe(umu, unu, family)
    assert probe.all_equal and w2(probe.candidate, unu) <= 2e-2
    sq = square_nu()
    family = [quadratic(random_spd(rng, 2), rng.normal(size=2)) for _ in range(3)]
    probe = minimal_element_probe(sq, sq, family)
    assert probe.all_equal and close(probe.candidate, sq)


def test_stalls_when_capped():
    with pytest.raises(FWStalled):
        minimize_phi_over_face(cross_mu(), cross_nu(), norm_sq(2), max_steps=1)


def _degenerate(rng):
    d = int(rng.integers(1, 3))
    return rational_measure(rng, 4, d, grid=1, wmax=2), rational_measure(rng, 4, d, grid=1, wmax=2)


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_eta_phi_guarantees(seed):
    rng = np.random.default_rng(seed)
    mu, nu = _degenerate(rng)
    phi = quadratic(random_spd(rng, mu.dim), rng.normal(size=mu.dim))
    res = minimize_phi_over_face(mu, nu, phi)
    h = np.array(res.history)
    assert np.all(np.diff(h) <= 1e-12 * (1 + np.abs(h[:-1])))
    assert res.fw_gap <= 1e-8
    fm, fn = mu.to_float(), nu.to_float()
    exact = float(solve_w2(mu, nu).w2_squared)
    assert abs(res.coupling.cost() - exact) <= 1e-9 * (1 + exact)
    assert in_I(fm, fn, res.eta)
    assert certify_structure(fm, res.eta).singleton_map


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_underline_is_projection(seed):
    rng = np.random.default_rng(seed)
    mu, nu = _degenerate(rng)
    low = underline_eta(mu, nu).eta
    fm = mu.to_float()
    best = w2(fm, low)
    verts = enumerate_optimal_vertices(mu, nu)
    base = [barycentric_projection(V)[1] for V in verts]
    etas = list(base)
    for _ in range(5):
        lam = rng.dirichlet(np.ones(len(base)))
        lam = [Fraction(int(round(v * 1000)), 1000) for v in lam]
        lam[-1] = 1 - sum(lam[:-1])
        if lam[-1] < 0:
            continue
        etas.append(mixture(base, lam))
    for eta in etas:
        assert best <= w2(fm, eta.to_float()) + 1e-9
