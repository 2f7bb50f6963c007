"""Exception hierarchy shared across the package."""


class NlwavesError(Exception):
    """Base class for all package errors."""


class DomainError(NlwavesError, ValueError):
    """Input outside the physically admissible domain."""


class ConfigurationError(NlwavesError, ValueError):
    """Inconsistent or invalid configuration / mismatched discretizations."""


class NumericalError(NlwavesError, RuntimeError):
    """A numerical procedure failed (eigensolve, blow-up, ...)."""


class DegeneracyError(NumericalError):
    """Near-defective eigenvalue pair: adjoint projection is ill-conditioned."""


class BlowupError(NumericalError):
    """Time integration produced non-finite or runaway amplitudes.

    Carries the partial time series (``series`` attribute) up to the last
    finite state, plus the time and flat index of the worst offender.
    """

    def __init__(self, msg, series=None, t=None, where=None):
        super().__init__(msg)
        self.series = series
        self.t = t
        self.where = where


class DiagnosticError(NlwavesError, ValueError):
    """A diagnostic cannot be computed from the given state (e.g. no dominant wave)."""
