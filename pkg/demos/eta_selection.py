"""
Selecting a barycentric image with a convex objective
=====================================================

The optimal couplings between two atoms and a four-point square form a
segment.  Each strictly convex quadratic phi picks one barycentric image
by minimizing the integral of phi over that image.  Different quadratics
pick different images, so there is no convex-order-minimal element.
"""
import numpy as np

from w2lab import convex_order_test, minimize_phi_over_face, underline_eta
from w2lab.catalog import cross_mu, square_nu
from w2lab.eta import minimal_element_probe, second_example_objective

mu, nu = cross_mu(), square_nu()

for p in (0.0, 0.3, 0.7, 1.0):
    res = minimize_phi_over_face(mu, nu, second_example_objective(p))
    print(f"p={p}: eta={res.eta}  FW gap={res.fw_gap:.1e}  steps={res.steps}")

# |x|^2 gives the image closest to mu
print("underline eta:", underline_eta(mu, nu).eta)

# two members of the family give images that are not comparable in convex order
probe = minimal_element_probe(mu, nu, [second_example_objective(p) for p in (0.0, 0.5, 1.0)])
a, b = probe.counterexample
ea, eb = probe.etas[a], probe.etas[b]
print("all equal:", probe.all_equal)
print("ordered a->b:", convex_order_test(ea, eb).ordered, " b->a:", convex_order_test(eb, ea).ordered)

# the FW objective never increases
hist = np.array(minimize_phi_over_face(mu, nu, second_example_objective(0.3)).history)
print("objective trace:", np.round(hist[:6], 6))
