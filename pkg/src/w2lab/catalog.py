"""Reference instances used by the reproducibility suite, tests and demos."""
from __future__ import annotations

from fractions import Fraction

from .measure import FLOAT, RATIONAL, DiscreteMeasure, canonicalize

HALF = Fraction(1, 2)


def cross_mu(mode: str = RATIONAL) -> DiscreteMeasure:
    """1/2 (delta_(-1,0) + delta_(1,0))."""
    return canonicalize([[-1, 0], [1, 0]], mode=mode)


def cross_nu(mode: str = RATIONAL) -> DiscreteMeasure:
    """1/2 (delta_(0,-1) + delta_(0,1))."""
    return canonicalize([[0, -1], [0, 1]], mode=mode)


def cross_kernel_coupling(p, mode: str = RATIONAL):
    """Coupling matrix of ``k_p`` between :func:`cross_mu` and :func:`cross_nu` (rows (-1,0), (1,0))."""
    p = Fraction(p) if mode == RATIONAL else float(p)
    return [[p / 2, (1 - p) / 2], [(1 - p) / 2, p / 2]]


def square_nu(mode: str = RATIONAL) -> DiscreteMeasure:
    """1/4 (delta_(-1,-1) + delta_(0,-1) + delta_(0,1) + delta_(1,1))."""
    return canonicalize([[-1, -1], [0, -1], [0, 1], [1, 1]], mode=mode)


def eta_p(p, mode: str = RATIONAL) -> DiscreteMeasure:
    """1/2 (delta_(-1/2,-p) + delta_(1/2,p))."""
    p = Fraction(p) if mode == RATIONAL else float(p)
    return canonicalize([[-HALF, -p], [HALF, p]], mode=mode)


def skew_nu(a, mode: str = RATIONAL) -> DiscreteMeasure:
    """1/4 (delta_(-1,-1) + delta_(-1,2a+1) + delta_(1,-2a-1) + delta_(1,1))."""
    a = Fraction(a) if mode == RATIONAL else float(a)
    return canonicalize([[-1, -1], [-1, 2 * a + 1], [1, -2 * a - 1], [1, 1]], mode=mode)


def skew_eta(a, mode: str = RATIONAL) -> DiscreteMeasure:
    """1/2 (delta_(-1,a) + delta_(1,-a))."""
    a = Fraction(a) if mode == RATIONAL else float(a)
    return canonicalize([[-1, a], [1, -a]], mode=mode)


def uniform_grid(n: int, lo, hi, mode: str = FLOAT) -> DiscreteMeasure:
    """Equal-weight quantile discretization of U[lo, hi]: atoms at the cell midpoints."""
    lo, hi = Fraction(lo), Fraction(hi)
    pts = [lo + (hi - lo) * Fraction(2 * i + 1, 2 * n) for i in range(n)]
    return canonicalize([[p] for p in pts], mode=mode)
