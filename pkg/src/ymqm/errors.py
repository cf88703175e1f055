"""Shared exception and warning types."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class AccuracyError(RuntimeError):
    """An internal series or quadrature failed to reach its accuracy target."""


class DivergentIntegralError(RuntimeError):
    """A requested integral is divergent for the given parameters."""


class ConvergenceError(RuntimeError):
    """Basis-truncation convergence was not reached."""

    def __init__(self, message, first_unconverged=None):
        super().__init__(message)
        self.first_unconverged = first_unconverged


class RegimeWarning(UserWarning):
    """An asymptotic formula is being used outside its validity regime."""
