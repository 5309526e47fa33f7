"""
Uniform measures on the line
============================

For mu uniform on [0, 1] and nu uniform on [0, 2] the only barycentric
image is nu itself.  The projection of mu onto the measures dominated by
nu in convex order is the uniform law on [1/2, 3/2], which is strictly
closer to mu.  Both facts are checked on quantile discretizations.
"""
from fractions import Fraction

from w2lab import map_exists_1d, underline_eta, w2
from w2lab.catalog import uniform_grid

for n in (25, 50, 100, 200):
    mu, nu = uniform_grid(n, 0, 1), uniform_grid(n, 0, 2)
    low = underline_eta(mu, nu).eta
    proj = uniform_grid(n, Fraction(1, 2), Fraction(3, 2))
    print(f"n={n:>3}: W2(underline eta, nu)={w2(low, nu):.2e}"
          f"  W2(mu, proj)={w2(mu, proj):.4f}  W2(mu, underline eta)={w2(mu, low):.4f}"
          f"  monotone map exists: {map_exists_1d(mu, nu).exists}")
