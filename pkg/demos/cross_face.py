"""
A degenerate optimal face
=========================

Two atoms on the horizontal axis are sent to two atoms on the vertical
axis.  Every coupling has the same cost, so the optimal face is a segment
and no optimal coupling is a map.
"""
from fractions import Fraction

from w2lab import barycentric_projection, certify_structure, enumerate_optimal_vertices, solve_w2
from w2lab.catalog import cross_kernel_coupling, cross_mu, cross_nu
from w2lab.coupling import make_coupling

mu, nu = cross_mu(), cross_nu()
sol = solve_w2(mu, nu)
print("W2^2 =", sol.w2_squared)

# the face is spanned by two vertices, both permutation couplings
verts = enumerate_optimal_vertices(mu, nu, sol)
for V in verts:
    print([[str(v) for v in row] for row in V.matrix])

# the structure certificate returns their midpoint as a witness of non-uniqueness
cert = certify_structure(mu, nu, sol)
print("unique:", cert.unique, " conditional variance of witness:", cert.conditional_variance)

# moving along the face moves the barycenter of the left atom along the vertical axis
for p in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
    pi = make_coupling(cross_kernel_coupling(p), mu, nu)
    T, eta = barycentric_projection(pi)
    print(f"p={p}: T(-1,0)=({T[0][0]}, {T[0][1]})  eta={eta}")
