from fractions import Fraction

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from w2lab.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, linprog_float, simplex_exact


def F(a, b=1):
    return Fraction(a, b)


def test_cycling_example_terminates():
    # classic instance on which the textbook largest-coefficient rule cycles
    c = [0, 0, 0, F(-3, 4), 20, F(-1, 2), 6]
    A = [
        [1, 0, 0, F(1, 4), -8, -1, 9],
        [0, 1, 0, F(1, 2), -12, F(-1, 2), 3],
        [0, 0, 1, 0, 0, 1, 0],
    ]
    res = simplex_exact(c, A, [0, 0, 1])
    assert res.status == OPTIMAL
    assert res.objective == F(-5, 4)


def test_unbounded():
    assert simplex_exact([-1, 0], [[1, -1]], [0]).status == UNBOUNDED


def test_redundant_rows():
    res = simplex_exact([1, 2], [[1, 1], [2, 2]], [1, 2])
    assert res.status == OPTIMAL and res.objective == 1


def test_farkas_certificate_on_infeasible():
    A = [[1, 1], [1, 1]]
    b = [1, 2]
    res = simplex_exact([0, 0], A, b)
    assert res.status == INFEASIBLE
    y = res.farkas
    assert all(sum(A[i][j] * y[i] for i in range(2)) <= 0 for j in range(2))
    assert sum(bi * yi for bi, yi in zip(b, y)) > 0


def test_float_backend():
    res = linprog_float([1, 1], A_eq=[[1, 1]], b_eq=[1])
    assert res.success and abs(res.objective - 1) < 1e-12
    assert linprog_float([0], A_eq=[[1]], b_eq=[-1]).status == INFEASIBLE


@st.composite
def small_lps(draw):
    m = draw(st.integers(1, 3))
    n = draw(st.integers(1, 5))
    ints = st.integers(-3, 3)
    A = draw(st.lists(st.lists(ints, min_size=n, max_size=n), min_size=m, max_size=m))
    b = draw(st.lists(ints, min_size=m, max_size=m))
    c = draw(st.lists(st.integers(0, 4), min_size=n, max_size=n))
    return c, A, b


@settings(max_examples=150)
@given(small_lps())
def test_exact_matches_highs(lp):
    c, A, b = lp
    res = simplex_exact(c, A, b)
    ref = linprog(c, A_eq=A, b_eq=b, bounds=(0, None), method="highs")
    if ref.status == 2:
        assert res.status == INFEASIBLE
        y = res.farkas
        AtY = np.array([sum(A[i][j] * y[i] for i in range(len(A))) for j in range(len(c))])
        assert all(v <= 0 for v in AtY)
        assert sum(bi * yi for bi, yi in zip(b, y)) > 0
    else:
        assert ref.status == 0  # c >= 0 keeps every feasible LP bounded
        assert res.status == OPTIMAL
        assert abs(float(res.objective) - ref.fun) <= 1e-9
        x = res.x
        assert all(v >= 0 for v in x)
        assert all(sum(A[i][j] * x[j] for j in range(len(c))) == b[i] for i in range(len(A)))
