"""Exception types raised across the package."""


class QMeasureError(Exception):
    """Base class for all package errors."""


class InvalidBoundsError(QMeasureError, ValueError):
    pass


class InvalidSpecError(QMeasureError, ValueError):
    pass


class GridTooSmallError(QMeasureError, ValueError):
    pass


class GridMismatchError(QMeasureError, ValueError):
    pass


class IllDefinedPhaseError(QMeasureError, ValueError):
    """Current is non-negligible where the density vanishes."""


class DegenerateDensityError(QMeasureError, ValueError):
    pass


class NoPointwiseFormError(QMeasureError, TypeError):
    """The ideal (Dirac) kernel has no pointwise density."""


class UnderResolvedKernelError(QMeasureError, ValueError):
    pass


class MissingObservableError(QMeasureError, ValueError):
    pass


class OracleDomainError(QMeasureError, ValueError):
    """A closed-form expression is evaluated outside its domain."""


class SamplingError(QMeasureError, ValueError):
    pass


class CalibrationError(QMeasureError, ValueError):
    pass


class InfeasibleObservationError(CalibrationError):
    pass


class UnidentifiableError(CalibrationError):
    pass


class OutOfRangeError(CalibrationError):
    pass


class AmbiguousWidthError(UnidentifiableError):
    """Two widths on opposite branches reproduce the same observation."""

    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = tuple(candidates)


class ConfigError(QMeasureError, ValueError):
    pass
