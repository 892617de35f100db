"""Exception hierarchy.

The three intermediate classes map onto CLI exit codes: precondition
failures exit with 3, numerical failures with 4, indeterminate decisions
with 5.
"""


class GkzLabError(Exception):
    """Base class for all library errors."""


class PreconditionError(GkzLabError, ValueError):
    """A mathematical precondition on the input does not hold."""


class NumericalFailure(GkzLabError, ArithmeticError):
    """A numerical tolerance could not be reached."""


class IndeterminateError(GkzLabError):
    """A decision procedure could not certify either answer."""


class NotSurjective(PreconditionError):
    pass


class DegenerateZonotope(PreconditionError):
    pass


class NonGenericNu(PreconditionError):
    pass


class ZeroCoordinate(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class DegenerateCone(PreconditionError):
    pass


class GammaNormalizationUndefined(PreconditionError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class NotFuchsian(PreconditionError):
    def __init__(self, message, index=None, point=None):
        super().__init__(message)
        self.index = index
        self.point = point


class ClearanceTooSmall(PreconditionError):
    pass


class RankUnsupported(PreconditionError):
    pass


class NoCommonFace(PreconditionError):
    pass


class ShapeMismatch(PreconditionError):
    pass


class IllDefinedPhi(PreconditionError):
    def __init__(self, message, choices=None):
        super().__init__(message)
        self.choices = choices


class StepUnderflow(NumericalFailure):
    pass


class IncompleteDecision(IndeterminateError):
    pass


class PosetInconsistency(GkzLabError, AssertionError):
    """Combinatorial and geometric face orders disagree (internal bug)."""
