"""
Finite differences of W2^2 along atom perturbations
===================================================

When the optimal coupling is a single map T, the remainder of the first
order expansion with derivative 2 (x - T(x)) vanishes faster than t.
When it is not, splitting atoms along Y - E[Y|X] lowers the cost at a
linear rate and the remainder stays of order t.
"""
from fractions import Fraction

import numpy as np

from w2lab import canonicalize, diff_certificate, fd_derivative_check
from w2lab.differentiability import nondiff_decrease_check, split_direction

ts = [Fraction(1, 10**k) for k in range(1, 6)]
rng = np.random.default_rng(0)

# differentiable: a unique monotone map on the line
mu = canonicalize([[0], [1], [3]], [1, 2, 1])
nu = canonicalize([[-2], [2], [5]], [1, 2, 1])
cert = diff_certificate(mu, nu)
print("differentiable:", cert.differentiable, " derivative:", cert.derivative.ravel().tolist())
rep = fd_derivative_check(mu, nu, rng.integers(-2, 3, size=(3, 1)).tolist(), ts)
for t, r in zip(rep.t, rep.residuals):
    print(f"  t={str(t):>8}  residual={float(r):.3e}")
print("  fitted order:", rep.fitted_order)

# not differentiable: one atom split onto two
mu, nu = canonicalize([[0]]), canonicalize([[-1], [1]])
cert = diff_certificate(mu, nu)
print("differentiable:", cert.differentiable, " |xi|^2:", cert.xi_norm_sq)
pi = cert.witness
rep = fd_derivative_check(mu, nu, split_direction(pi), ts, coupling=pi, require_differentiable=False)
print("  fitted order along the split:", round(rep.fitted_order, 4))
dec = nondiff_decrease_check(mu, nu, pi, ts)
for t, wt, bound, slack in dec.rows:
    print(f"  t={str(t):>8}  W2^2(mu_t, nu)={wt}  bound={bound}")
