"""Exception hierarchy for the fastsdr package.

Three families matter to callers: validation errors (bad inputs), solver
errors (numerical failure in a linear system), and I/O errors (delegated to
the builtin OSError/ValueError raised by the WAV layer). The CLI maps these
families to distinct exit codes.
"""


class FastSdrError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FastSdrError):
    """Input signals or configuration violate a precondition."""


class EmptyInputError(ValidationError):
    """A signal set has no channels or no samples."""


class LengthMismatchError(ValidationError):
    """Reference and estimate signals disagree on sample count or rate."""


class ZeroSignalError(ValidationError):
    """A channel has zero energy and cannot be normalized."""

    def __init__(self, channel: int, role: str = "signal"):
        self.channel = channel
        self.role = role
        super().__init__(f"{role} channel {channel} has zero energy")


class FilterTooLongError(ValidationError):
    """Distortion-filter length is not shorter than the signals."""


class SolverError(FastSdrError):
    """Base class for linear-solver failures."""


class BreakdownError(SolverError):
    """Conjugate-gradient search direction hit nonpositive curvature."""


class LevinsonBreakdownError(SolverError):
    """Levinson recursion produced a nonpositive reflection denominator."""


class SingularSystemError(SolverError):
    """Dense factorization failed even after maximum regularization."""


class NonPositivePreconditionerError(SolverError):
    """A circulant preconditioner has a nonpositive eigenvalue or bin."""


class SolverFailureError(SolverError):
    """All solvers in the fallback chain failed for one system."""


class SingularGramError(FastSdrError):
    """The dense Gram matrix in the reference oracle is not invertible."""


class SizeCapError(FastSdrError):
    """A dense oracle computation exceeds the configured size cap."""
