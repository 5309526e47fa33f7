from fractions import Fraction
from math import sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from w2lab import canonicalize, solve_w2
from w2lab.catalog import cross_mu, cross_nu
from w2lab.coupling import conditional_variance, identity_coupling, make_coupling
from w2lab.differentiability import (
    ORDER_THRESHOLD,
    diff_certificate,
    fd_derivative_check,
    fitted_order,
    nondiff_decrease_check,
    perturbed_measure,
    prime_perturbation_demo,
    split_direction,
)
from w2lab.errors import DiracTarget, NotDifferentiable, NotEnoughPoints
from w2lab.measure import dirac, same_measure
from w2lab.transport import certify_structure, w2

from instances import rational_measure

F = Fraction
half = F(1, 2)
pm1 = canonicalize([[-1], [1]])
small_t = [F(1, 10**k) for k in range(1, 5)]


def test_certificate_examples():
    mu = canonicalize([[0, 1], [2, 2]])
    c = diff_certificate(mu, mu)
    assert c.differentiable and np.all(c.derivative == 0) and c.witness is None
    c = diff_certificate(dirac([0]), pm1)
    assert not c.differentiable and c.xi_norm_sq == 1 and c.derivative is None
    c = diff_certificate(canonicalize([[0], [1]]), canonicalize([[2], [3]]))
    assert c.differentiable and c.derivative.tolist() == [[-4], [-4]]


def test_perturbed_measure_examples():
    pi = make_coupling([[half, half]], dirac([0]), pm1)
    assert same_measure(perturbed_measure(dirac([0]), pm1, pi, 0).measure, dirac([0]))
    assert same_measure(perturbed_measure(dirac([0]), pm1, pi, half).measure,
                        canonicalize([[-half], [half]]))
    mu = canonicalize([[0], [1]])
    assert same_measure(perturbed_measure(mu, mu, identity_coupling(mu), F(1, 3)).measure, mu)


def test_decrease_examples():
    pi = make_coupling([[half, half]], dirac([0]), pm1)
    rep = nondiff_decrease_check(dirac([0]), pm1, pi, [1, half])
    assert rep.passed
    assert rep.rows[0][1] == 0 and rep.rows[0][2] == 0
    assert rep.rows[1][1] == F(1, 4) and rep.rows[1][2] == F(1, 4)
    mu, nu = cross_mu(), cross_nu()
    witness = certify_structure(mu, nu).witness_coupling
    rep = nondiff_decrease_check(mu, nu, witness, [F(1, 10), F(1, 100)])
    assert rep.passed and all(r[3] >= 0 for r in rep.rows)


def test_fd_examples():
    mu, nu = canonicalize([[0], [1]]), canonicalize([[2], [3]])
    # a rigid shift keeps the monotone map, so W2^2(mu_t, nu) = (2 - t)^2 and the remainder is t^2
    rep = fd_derivative_check(mu, nu, [[1], [1]], small_t)
    assert list(rep.residuals) == [t * t for t in small_t]
    assert abs(rep.fitted_order - 2) < 1e-12
    rng = np.random.default_rng(1)
    c = cross_mu()
    rep = fd_derivative_check(c, c, rng.integers(-3, 4, size=(2, 2)).tolist(), small_t)
    assert rep.fitted_order >= ORDER_THRESHOLD
    with pytest.raises(NotDifferentiable):
        fd_derivative_check(dirac([0]), pm1, [[1]], small_t)


def test_fd_on_random_unique_map_in_plane():
    rng = np.random.default_rng(7)
    found = 0
    while found < 3:
        mu = canonicalize(rng.integers(-5, 6, size=(4, 2)).tolist())
        nu = canonicalize(rng.integers(-5, 6, size=(4, 2)).tolist())
        if not diff_certificate(mu, nu).differentiable:
            continue
        found += 1
        for _ in range(3):
            D = rng.integers(-3, 4, size=(mu.n, 2)).tolist()
            ts = [F(1, 10**k) for k in range(3, 7)]
            assert fd_derivative_check(mu, nu, D, ts).fitted_order >= ORDER_THRESHOLD


def test_split_direction_is_linear_for_nondiff():
    mu, nu = cross_mu(), cross_nu()
    pi = certify_structure(mu, nu).witness_coupling
    rep = fd_derivative_check(mu, nu, split_direction(pi), small_t, coupling=pi, require_differentiable=False)
    assert rep.fitted_order < ORDER_THRESHOLD


def test_fitted_order():
    assert fitted_order([1e-1, 1e-2], [0, 0]) == float("inf")
    assert abs(fitted_order([1e-1, 1e-2, 1e-3], [1e-2, 1e-4, 1e-6]) - 2) < 1e-12


def test_prime_demo_examples():
    pts = np.arange(7, dtype=float)[:, None]
    rep = prime_perturbation_demo(pts, pm1, [2, 3, 5, 7])
    assert rep.feasible_primes == (2,)
    third = canonicalize([[0], [1], [2]])
    rep = prime_perturbation_demo(pts[:5], third, [2, 3, 5])
    assert rep.feasible_primes == (3,)
    with pytest.raises(DiracTarget):
        prime_perturbation_demo(pts, dirac([0]), [2, 3])
    with pytest.raises(NotEnoughPoints):
        prime_perturbation_demo(pts[:3], pm1, [2, 3, 5])


pairs = st.integers(0, 2**32 - 1).map(
    lambda s: (lambda r, d: (rational_measure(r, 4, d), rational_measure(r, 4, d)))(
        np.random.default_rng(s), int(np.random.default_rng(s).integers(1, 3))))


@settings(max_examples=80)
@given(pairs)
def test_dichotomy_and_derivative_norm(pair):
    mu, nu = pair
    c = diff_certificate(mu, nu)
    assert (c.derivative is None) != (c.witness is None)
    if c.differentiable:
        norm = sum(w * sum(v * v for v in row) for w, row in zip(mu.weights, c.derivative))
        assert norm == 4 * solve_w2(mu, nu).w2_squared
    else:
        assert c.xi_norm_sq == conditional_variance(c.witness) > 0


@settings(max_examples=60)
@given(pairs, st.fractions(F(1, 100), 1, max_denominator=100))
def test_perturbation_bounds(pair, t):
    mu, nu = pair
    sol = solve_w2(mu, nu)
    pi = certify_structure(mu, nu, sol).witness_coupling
    V = conditional_variance(pi)
    mt = perturbed_measure(mu, nu, pi, t).measure
    assert solve_w2(mt, mu).w2_squared <= t * t * V
    assert solve_w2(mt, nu).w2_squared <= sol.w2_squared - (2 * t - t * t) * V
    assert w2(mt, mu) <= float(t) * sqrt(float(V)) + 1e-12
