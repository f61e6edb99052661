"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so that the command line
driver can report which condition was hit without parsing messages.
"""


class DrinlogError(Exception):
    code = "MATH_ERROR"


class FieldError(DrinlogError):
    code = "FIELD_ERROR"


class PrecisionError(DrinlogError):
    """Division by an apparent zero, or no known digits left."""

    code = "PRECISION_EXHAUSTED"


class NotAPowerError(DrinlogError):
    code = "NOT_A_POWER"


class RamificationError(DrinlogError):
    """A valuation is not divisible as required; a larger ramification index is needed."""

    code = "NEEDS_RAMIFICATION"


class ResidueTooSmallError(DrinlogError):
    code = "RESIDUE_TOO_SMALL"


class TailNotConvergedError(DrinlogError):
    code = "TAIL_NOT_CONVERGED"


class NormNotContractingError(DrinlogError):
    code = "NORM_NOT_CONTRACTING"


class NoIntegralSlopeError(DrinlogError):
    code = "NO_INTEGRAL_SLOPE"


class ResidueUnsolvableError(DrinlogError):
    code = "RESIDUE_UNSOLVABLE"


class StallError(DrinlogError):
    code = "STALL"


class DimensionError(DrinlogError):
    code = "DIMENSION_MISMATCH"


class SingularError(DrinlogError):
    code = "SINGULAR"


class UnexpectedEdgeError(DrinlogError):
    """A Newton polygon step took a shape the valuation argument rules out."""

    code = "UNEXPECTED_EDGE"
