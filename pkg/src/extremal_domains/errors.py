"""Exception hierarchy shared by all solver modules."""


class ExtremalError(Exception):
    """Base class for every error raised by this package."""


class InvalidDomainError(ExtremalError, ValueError):
    pass


class ArityError(ExtremalError, ValueError):
    pass


class PreconditionError(ExtremalError, ValueError):
    pass


class FredholmViolationError(PreconditionError):
    """Mode-0 boundary data is not orthogonal to the eigenfunction flux."""


class ConvergenceError(ExtremalError, RuntimeError):
    """An iterative solve hit its iteration limit.

    ``diagnostics`` holds the last residual, shift and iteration count.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ResonanceError(ExtremalError, RuntimeError):
    """The shifted mode operator is not positive definite."""


class TruncationInconclusiveError(ExtremalError, RuntimeError):
    """Mode scan reached ``kmax`` without the positivity streak."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
