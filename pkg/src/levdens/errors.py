"""Exception and warning types shared across the package."""


class LevdensError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(LevdensError, ValueError):
    """A constructor or operation received an inadmissible parameter."""


class DomainError(LevdensError, ValueError):
    """A numerically valid input lies outside an operation's domain."""


class AccuracyError(LevdensError):
    """A quadrature or solve did not converge to the requested accuracy.

    Carries the residual estimate when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MatchingError(LevdensError):
    """Asymptotic least-squares matching exceeded the allowed residual."""

    def __init__(self, message, k=None, residual=None):
        super().__init__(message)
        self.k = k
        self.residual = residual


class UnwrapError(LevdensError):
    """Phase unwrapping could not be made unambiguous on the k-grid."""


class AmbiguousClassificationError(LevdensError):
    """The k -> 0 reflection limit fell in the ambiguous band.

    Carries the extrapolated |b(0)| estimate and the probe data.
    """

    def __init__(self, message, b0_magnitude=None, probes=None):
        super().__init__(message)
        self.b0_magnitude = b0_magnitude
        self.probes = probes


class ResolutionError(LevdensError):
    """A count or value did not stabilize under grid refinement."""


class NearThresholdWarning(UserWarning):
    """An eigenvalue sits within tolerance of zero (half-bound state)."""
