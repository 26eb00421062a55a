"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input is outside the mathematical/physical domain of an operation."""


class UnsupportedRangeError(DomainError):
    """Input is formally valid but outside the validated regime."""


class ConvergenceError(RuntimeError):
    """A truncated expansion failed its convergence criterion."""


class StepSizeError(RuntimeError):
    """Finite-difference results at step and half-step disagree."""


class ConsistencyError(RuntimeError):
    """Two independent numerical routes to the same quantity disagree."""


class NkParseError(ValueError):
    """Malformed optical-constants file."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class PropagationError(RuntimeError):
    """A non-finite value appeared while propagating derived quantities."""
