"""Exception types raised across the package.

Everything inherits from FracvolError so callers can catch the whole family;
most also inherit ValueError because they signal bad argument values.
"""


class FracvolError(Exception):
    """Base class for all package-specific errors."""


# ---------------------------------------------------------------------------
# shared numerics


class DegenerateDesign(FracvolError, ValueError):
    """Polynomial fit is underdetermined (too few distinct abscissae)."""


class LengthMismatch(FracvolError, ValueError):
    """Paired inputs have different lengths."""


class TooShort(FracvolError, ValueError):
    """Series is too short for the requested operation."""


class NonPositiveInput(FracvolError, ValueError):
    """A value that must be strictly positive is zero or negative."""


# ---------------------------------------------------------------------------
# fractal estimator


class ScaleTooLarge(FracvolError, ValueError):
    """A segment scale exceeds what the series length supports."""


class AllZeroFluctuations(FracvolError, ValueError):
    """Every segment has zero detrended fluctuation; no exponent is defined."""


class InsufficientScales(FracvolError, ValueError):
    """Fewer than two usable scales remain for a requested exponent fit."""


class EstimationFailure(FracvolError, ValueError):
    """An estimated exponent fell outside the plausibility band [-0.5, 2.0]."""


# ---------------------------------------------------------------------------
# oscillator


class UnknownType(FracvolError, ValueError):
    """Oscillator type id is not one of the built-in parameterizations."""


class EmptyLibrary(FracvolError, ValueError):
    """An oscillator library or activation vector is empty."""


class InvalidDomain(FracvolError, ValueError):
    """Lookup-table domain is empty, inverted, or has too few knots."""


# ---------------------------------------------------------------------------
# market features


class NonPositivePrice(FracvolError, ValueError):
    """Price series contains a zero or negative price."""


class EmptyDay(FracvolError, ValueError):
    """A trading day carries no intraday returns."""


class TooFewReturns(FracvolError, ValueError):
    """Bipower variation needs at least two intraday returns."""


class NonPositiveBPV(FracvolError, ValueError):
    """Bipower variation must be positive to take logarithms."""


class ConstantFeature(FracvolError, ValueError):
    """Min-max scaling is undefined for a feature with zero range."""


# ---------------------------------------------------------------------------
# synthetic generators


class NonStationaryParams(FracvolError, ValueError):
    """GARCH parameters violate stationarity (alpha + beta >= 1) or sign."""


class InvalidH(FracvolError, ValueError):
    """Hurst exponent outside the open interval (0, 1)."""


# ---------------------------------------------------------------------------
# forecaster


class InsufficientData(FracvolError, ValueError):
    """Not enough aligned rows to build a supervised dataset."""


class DivergedLoss(FracvolError, ArithmeticError):
    """Training loss became non-finite."""


class EmptySplit(FracvolError, ValueError):
    """Evaluation requested on an empty split."""
