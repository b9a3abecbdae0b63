"""Exception hierarchy.

Every error raised by the package derives from :class:`GroupAccessError`.
Errors caused by malformed input derive from :class:`InvalidInput` and
errors caused by numerical breakdown derive from :class:`NumericFailure`;
the CLI maps these to exit codes 2 and 3.
"""


class GroupAccessError(Exception):
    """Base class for all package errors."""

    code = "error"


class InvalidInput(GroupAccessError, ValueError):
    code = "invalid_input"


class NumericFailure(GroupAccessError, ArithmeticError):
    code = "numeric_failure"


# group_core
class ClosureOverflow(InvalidInput):
    code = "closure_overflow"


class IncompatibleGenerators(InvalidInput):
    code = "incompatible_generators"


class IndexOutOfRange(InvalidInput, IndexError):
    code = "index_out_of_range"


class GroupTooLarge(InvalidInput):
    code = "group_too_large"


class InvalidTable(InvalidInput):
    code = "invalid_table"


# channel_rep
class NotUnitary(InvalidInput):
    code = "not_unitary"


class HomomorphismViolation(InvalidInput):
    code = "homomorphism_violation"


class LengthMismatch(InvalidInput):
    code = "length_mismatch"


class NotTracePreserving(InvalidInput):
    code = "not_trace_preserving"


class ShapeMismatch(InvalidInput):
    code = "shape_mismatch"


# accessibility
class NotInAffineHull(InvalidInput):
    code = "not_in_affine_hull"


class NotAbelian(InvalidInput):
    code = "not_abelian"


class NonFinite(NumericFailure):
    code = "non_finite"


class SingularMatrix(NumericFailure):
    code = "singular_matrix"


class NegativeRealEigenvalue(NumericFailure):
    code = "negative_real_eigenvalue"


# polytope_geometry
class DegeneratePolytope(InvalidInput):
    code = "degenerate_polytope"


class TriangulationOverflow(InvalidInput):
    code = "triangulation_overflow"


class OffsetOutsidePolytope(InvalidInput):
    code = "offset_outside_polytope"


class RatioOverflow(InvalidInput, OverflowError):
    code = "ratio_overflow"
