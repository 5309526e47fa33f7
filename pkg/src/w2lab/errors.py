"""Exception hierarchy.  Every domain error carries a machine-readable ``code``
used by the command-line front end."""


class W2LabError(Exception):
    code = "domain_error"


class EmptyMeasure(W2LabError):
    code = "empty_measure"


class DimensionMismatch(W2LabError):
    code = "dimension_mismatch"


class WrongDimension(W2LabError):
    code = "wrong_dimension"


class ModeMismatch(W2LabError):
    code = "mode_mismatch"


class InvalidInput(W2LabError):
    code = "invalid_input"


class SupportMismatch(W2LabError):
    code = "support_mismatch"


class MartingaleViolation(W2LabError):
    code = "martingale_violation"


class InfeasibleFace(W2LabError):
    code = "infeasible_face"


class TooLarge(W2LabError):
    code = "too_large"


class NotOptimal(W2LabError):
    code = "not_optimal"


class NotStrictlyConvex(W2LabError):
    code = "not_strictly_convex"


class FWStalled(W2LabError):
    code = "fw_stalled"


class NotDifferentiable(W2LabError):
    code = "not_differentiable"


class NotEnoughPoints(W2LabError):
    code = "not_enough_points"


class DiracTarget(W2LabError):
    code = "dirac_target"


class CertificateFailure(W2LabError):
    """An internal consistency check failed; signals a solver bug."""

    code = "certificate_failure"
