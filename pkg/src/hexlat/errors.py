"""Exception types raised by hexlat."""


class HexlatError(Exception):
    """Base class for all hexlat errors."""


class BoxTooSmallError(HexlatError):
    """Periodic box cannot hold the light cone at the requested time."""


class InsufficientResolutionError(HexlatError):
    """Quadrature grid is below the oversampled Nyquist policy."""


class DegenerateWindowError(HexlatError):
    """Too few samples inside a fitting window."""


class ZeroValueError(HexlatError):
    """A log-log fit received a non-positive value."""


class UnclassifiedSingularityError(HexlatError):
    """Both the cubic coefficient and the quartic discriminant vanish."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class CertificationFailedError(HexlatError):
    """Curve-intersection certification found offending cells."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SubprincipalMonomialError(HexlatError):
    """A monomial has weighted degree below one."""


class UnsupportedSupportError(HexlatError):
    """R-nondegeneracy is only decided for the two normal-form families."""


class DivergedError(HexlatError):
    """Picard iterates stopped contracting."""
