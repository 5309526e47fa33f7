"""Certified quadratic optimal transport between finitely supported measures.

Exact (``Fraction``) and floating-point modes share one API:

>>> from w2lab import canonicalize, solve_w2
>>> mu = canonicalize([[-1, 0], [1, 0]])
>>> nu = canonicalize([[0, -1], [0, 1]])
>>> solve_w2(mu, nu).w2_squared
Fraction(2, 1)
"""
from .convex_order import ConvexOrderResult, SeparatingFunction, convex_order_1d, convex_order_test, is_martingale
from .coupling import (
    Coupling,
    Kernel,
    barycentric_map,
    barycentric_projection,
    compose,
    conditional_variance,
    cost_matrix,
    disintegrate,
    identity_coupling,
    is_martingale_coupling,
    make_coupling,
    product_coupling,
)
from .decomposition import decompose, decomposition_residual, identity_residual, in_I
from .differentiability import (
    DiffCertificate,
    PerturbedMeasure,
    diff_certificate,
    fd_derivative_check,
    nondiff_decrease_check,
    perturbed_measure,
    prime_perturbation_demo,
    split_direction,
)
from .errors import W2LabError
from .eta import (
    ConvexObjective,
    minimal_element_probe,
    minimize_phi_over_face,
    norm_sq,
    quadratic,
    tie_break_eta_phi,
    underline_eta,
)
from .measure import (
    FLOAT,
    RATIONAL,
    DiscreteMeasure,
    canonicalize,
    dirac,
    mean,
    measure,
    mixture,
    push_forward,
    second_moment,
)
from .quantile import (
    QuantileFunction,
    barycentric_image_1d,
    barycentric_map_1d,
    comonotone_coupling,
    map_exists_1d,
    martingale_coupling_1d,
    quantile_of,
    w2_squared_1d,
)
from .transport import (
    DualCertificate,
    StructureCertificate,
    W2Solution,
    certify_structure,
    enumerate_optimal_vertices,
    face_coordinate_range,
    face_dimension,
    solve_w2,
    w2,
    w2_squared,
)

__version__ = "0.1.0"
