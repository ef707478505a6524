"""Shared numerical primitives: polynomial least squares and scaling fits.

Least-squares fits go through a QR factorization of the Vandermonde matrix
rather than normal-equation inversion; segment abscissae 0..s-1 with s in the
hundreds make the normal equations ill-conditioned while QR stays stable.

The log-log fit estimates the exponent h of a power law F(s) ~ c * s**h as
the OLS slope of ln F on ln s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDesign, LengthMismatch, NonPositiveInput, TooShort


@dataclass(frozen=True)
class Polynomial:
    """Coefficients ordered lowest degree first; len(coefficients) == degree + 1."""

    coefficients: np.ndarray
    degree: int

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coefficients)


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int


def polyfit(xs, ys, degree: int) -> Polynomial:
    """Least-squares polynomial of the given degree through (xs, ys).

    Raises LengthMismatch on unequal inputs and DegenerateDesign when fewer
    than degree + 1 distinct abscissae are available.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise LengthMismatch(f"xs has {xs.size} points, ys has {ys.size}")
    if degree < 0:
        raise DegenerateDesign("degree must be nonnegative")
    if np.unique(xs).size < degree + 1:
        raise DegenerateDesign(
            f"need {degree + 1} distinct abscissae for degree {degree}, "
            f"got {np.unique(xs).size}"
        )
    vander = np.vander(xs, degree + 1, increasing=True)
    q, r = np.linalg.qr(vander)
    coeffs = np.linalg.solve(r, q.T @ ys)
    return Polynomial(coefficients=coeffs, degree=degree)


def linear_trend_slope(ys) -> float:
    """Slope of the degree-1 least-squares fit on the implicit abscissa 0..n-1."""
    ys = np.asarray(ys, dtype=np.float64)
    if ys.size < 2:
        raise TooShort(f"need at least 2 points for a trend slope, got {ys.size}")
    return float(polyfit(np.arange(ys.size, dtype=np.float64), ys, 1).coefficients[1])


def loglog_fit(sizes, values) -> ScalingFit:
    """OLS of ln(values) on ln(sizes); the slope is the scaling exponent."""
    sizes = np.asarray(sizes, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if sizes.shape != values.shape or sizes.ndim != 1:
        raise LengthMismatch(f"{sizes.size} sizes vs {values.size} values")
    if sizes.size < 2:
        raise TooShort("log-log fit needs at least 2 points")
    if np.any(sizes <= 0) or np.any(values <= 0):
        raise NonPositiveInput("log-log fit requires strictly positive inputs")
    lx = np.log(sizes)
    ly = np.log(values)
    fit = polyfit(lx, ly, 1)
    resid = ly - fit(lx)
    sse = float(resid @ resid)
    centered = ly - ly.mean()
    sst = float(centered @ centered)
    if sst == 0.0:
        r2 = 1.0 if sse == 0.0 else 0.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - sse / sst))
    return ScalingFit(
        slope=float(fit.coefficients[1]),
        intercept=float(fit.coefficients[0]),
        r_squared=r2,
        n_points=int(sizes.size),
    )


# ---------------------------------------------------------------------------
# detrending bases shared by the segment kernels

_BASIS_CACHE: dict[tuple[int, int], np.ndarray] = {}
_SLOPE_CACHE: dict[int, np.ndarray] = {}


def detrend_basis(length: int, order: int) -> np.ndarray:
    """Orthonormal basis (length x (order+1)) spanning polynomials on 0..length-1.

    Residual after projecting out these columns equals the least-squares
    detrending residual. Cached; treat the returned array as read-only.
    """
    key = (length, order)
    basis = _BASIS_CACHE.get(key)
    if basis is None:
        t = np.arange(length, dtype=np.float64)
        vander = np.vander(t, order + 1, increasing=True)
        basis, _ = np.linalg.qr(vander)
        basis = np.ascontiguousarray(basis)
        _BASIS_CACHE[key] = basis
    return basis


def slope_weights(length: int) -> np.ndarray:
    """Weights w with w . y == degree-1 least-squares slope of y on 0..length-1."""
    w = _SLOPE_CACHE.get(length)
    if w is None:
        t = np.arange(length, dtype=np.float64)
        tc = t - t.mean()
        w = tc / (tc @ tc)
        _SLOPE_CACHE[length] = w
    return w
