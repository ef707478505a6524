"""Overlapping-window multifractal cross-correlation analysis with
trend-direction discrimination.

Pipeline for a return-series pair (rx, ry):

  1. profiles: P(t) = cumulative sum of (series - mean)
  2. windows of size s placed with stride floor(s*(1-rho) + 0.5), clamped
     to >= 1, giving floor((N-s)/stride) + 1 windows
  3. per window, order-m least-squares detrending of both profiles on the
     local abscissa 0..s-1; the window fluctuation is
     F2 = mean |residual_x(i) * residual_y(i)|
  4. per window, the local trend slope beta is the degree-1 fit slope of
     the raw primary series rx over the same window; sign(beta) assigns
     the window to the uptrend or downtrend class (beta == 0: neither)
  5. F_q(s) = (mean of F2**(q/2) over a class)**(1/q); at q=0 the
     log-domain form exp(mean(ln F2) / 2) is used instead
  6. the scaling exponent is the slope of ln F_q(s) versus ln s, fitted
     separately for the overall, uptrend and downtrend classes

Rolling feature generation repeats the whole pipeline over sliding windows
of T observations with stride k; each estimate is stamped at its window's
last index so features never look ahead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import backend
from .errors import (
    AllZeroFluctuations,
    DegenerateDesign,
    EstimationFailure,
    InsufficientScales,
    LengthMismatch,
    ScaleTooLarge,
    TooShort,
)
from .numerics import ScalingFit, detrend_basis, loglog_fit, slope_weights

PLAUSIBLE_H = (-0.5, 2.0)


@dataclass(frozen=True)
class FractalConfig:
    """Estimator parameters.

    scales=None derives a default grid from the series (or rolling window)
    length at call time: ~15 log-spaced integers from 16 to length // 4.
    """

    overlap_ratio: float = 1.0 / 3.0
    detrend_order: int = 2
    q: float = 2.0
    scales: Optional[tuple[int, ...]] = None
    min_directional_segments: int = 4

    def __post_init__(self):
        if not 0.0 <= self.overlap_ratio < 1.0:
            raise ValueError(f"overlap_ratio must be in [0, 1), got {self.overlap_ratio}")
        if self.detrend_order < 1:
            raise ValueError("detrend_order must be >= 1")
        if self.min_directional_segments < 1:
            raise ValueError("min_directional_segments must be >= 1")
        if self.scales is not None:
            scales = tuple(int(s) for s in self.scales)
            if len(scales) < 2:
                raise InsufficientScales("need at least 2 scales")
            if any(b <= a for a, b in zip(scales, scales[1:])):
                raise ValueError("scales must be strictly increasing")
            if scales[0] < self.detrend_order + 2:
                raise ValueError(
                    f"smallest scale {scales[0]} cannot support an order-"
                    f"{self.detrend_order} detrend"
                )
            object.__setattr__(self, "scales", scales)


@dataclass(frozen=True)
class FluctuationRow:
    """Fluctuation values at one scale. Directional values are None when the
    class has fewer than min_directional_segments members (or only zero
    fluctuations under q <= 0)."""

    scale: int
    f_all: float
    f_pos: Optional[float]
    f_neg: Optional[float]
    n_pos: int
    n_neg: int


@dataclass(frozen=True)
class HurstTriple:
    h_overall: float
    h_positive: float
    h_negative: float
    fit_overall: ScalingFit
    fit_positive: ScalingFit
    fit_negative: ScalingFit


def default_scale_grid(
    length: int,
    s_min: int = 16,
    n_scales: int = 15,
    s_max: Optional[int] = None,
) -> tuple[int, ...]:
    """~n_scales log-spaced integer scales from s_min to s_max (length // 4)."""
    if s_max is None:
        s_max = length // 4
    if s_max < s_min:
        raise InsufficientScales(
            f"series of length {length} cannot fit a scale grid from "
            f"{s_min} to {s_max}"
        )
    grid = np.exp(np.linspace(math.log(s_min), math.log(s_max), n_scales))
    scales = tuple(int(v) for v in np.unique(np.round(grid).astype(int)))
    if len(scales) < 2:
        raise InsufficientScales(f"degenerate scale grid for length {length}")
    return scales


def build_profile(series) -> np.ndarray:
    """Cumulative sum of the mean-centered series."""
    x = np.asarray(series, dtype=np.float64)
    if x.size < 2:
        raise TooShort(f"profile needs at least 2 observations, got {x.size}")
    return np.cumsum(x - x.mean())


def _segment_starts(n: int, s: int, rho: float) -> np.ndarray:
    if s > n:
        raise ScaleTooLarge(f"scale {s} exceeds series length {n}")
    if s < 1:
        raise ValueError("scale must be positive")
    stride = int(math.floor(s * (1.0 - rho) + 0.5))
    if stride < 1:
        stride = 1
    n_seg = (n - s) // stride + 1
    return np.arange(n_seg, dtype=np.intp) * stride


def segment_overlapping(n: int, s: int, rho: float) -> list[tuple[int, int]]:
    """Window (start, length) pairs covering a length-n series at scale s."""
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"overlap ratio must be in [0, 1), got {rho}")
    return [(int(start), s) for start in _segment_starts(n, s, rho)]


def segment_fluctuation(px_seg, py_seg, m: int = 2) -> float:
    """Mean absolute residual product of one window after order-m detrending.

    Both profile windows are detrended on the local abscissa 0..s-1; the
    result is (1/s) * sum |rx(i) * ry(i)|.
    """
    px_seg = np.asarray(px_seg, dtype=np.float64)
    py_seg = np.asarray(py_seg, dtype=np.float64)
    if px_seg.shape != py_seg.shape or px_seg.ndim != 1:
        raise LengthMismatch(f"{px_seg.size} vs {py_seg.size} points")
    if px_seg.size < m + 2:
        raise DegenerateDesign(
            f"window of {px_seg.size} points cannot support an order-{m} detrend"
        )
    return backend.seg_fluct_one(px_seg, py_seg, detrend_basis(px_seg.size, m))


def aggregate_fq(f2_values, q: float) -> Optional[float]:
    """Collapse per-window squared fluctuations into F_q.

    q > 0: (mean F2**(q/2))**(1/q), zero windows contributing 0.
    q == 0: exp(mean(ln F2) / 2) over nonzero windows (log-domain form).
    q < 0: as q > 0 but zero windows are skipped (their power diverges).
    Returns None when no usable windows remain.
    """
    f2 = np.asarray(f2_values, dtype=np.float64)
    if f2.size == 0:
        return None
    if q == 0.0:
        nz = f2[f2 > 0.0]
        if nz.size == 0:
            return None
        return float(np.exp(np.log(nz).mean() / 2.0))
    if q < 0.0:
        f2 = f2[f2 > 0.0]
        if f2.size == 0:
            return None
    return float(np.mean(f2 ** (q / 2.0)) ** (1.0 / q))


def directional_fluctuations(
    px, py, trend_proxy, cfg: FractalConfig, s: int
) -> FluctuationRow:
    """FluctuationRow at scale s for profiles (px, py) with trend classes
    taken from the raw primary series trend_proxy."""
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    proxy = np.asarray(trend_proxy, dtype=np.float64)
    if not px.size == py.size == proxy.size:
        raise LengthMismatch("profiles and trend proxy must share one length")
    starts = _segment_starts(px.size, s, cfg.overlap_ratio)
    basis = detrend_basis(s, cfg.detrend_order)
    f2 = backend.seg_fluct_batch(px, py, starts, s, basis)
    if not np.any(f2 > 0.0):
        raise AllZeroFluctuations(f"all {f2.size} windows at scale {s} are flat")
    beta = backend.dot_batch(proxy, starts, slope_weights(s))
    pos = beta > 0.0
    neg = beta < 0.0
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())

    f_all = aggregate_fq(f2, cfg.q)

    def directional(mask, count):
        if count < cfg.min_directional_segments:
            return None
        value = aggregate_fq(f2[mask], cfg.q)
        if value is None or value <= 0.0:
            return None
        return value

    return FluctuationRow(
        scale=s,
        f_all=float(f_all),
        f_pos=directional(pos, n_pos),
        f_neg=directional(neg, n_neg),
        n_pos=n_pos,
        n_neg=n_neg,
    )


def _fit_exponent(scales, values, label: str) -> ScalingFit:
    if len(scales) < 2:
        raise InsufficientScales(
            f"only {len(scales)} usable scales for the {label} exponent"
        )
    fit = loglog_fit(scales, values)
    if not PLAUSIBLE_H[0] <= fit.slope <= PLAUSIBLE_H[1]:
        raise EstimationFailure(
            f"{label} exponent {fit.slope:.3f} outside plausibility band "
            f"[{PLAUSIBLE_H[0]}, {PLAUSIBLE_H[1]}]"
        )
    return fit


def mf_adcca(rx, ry, cfg: Optional[FractalConfig] = None) -> HurstTriple:
    """Overall and directional scaling exponents of a return-series pair.

    rx doubles as the trend proxy for direction classification. With
    rx is ry the cross-fluctuation reduces to the squared single-series
    residuals, i.e. plain detrended fluctuation analysis.
    """
    cfg = cfg or FractalConfig()
    rx = np.asarray(rx, dtype=np.float64)
    ry = np.asarray(ry, dtype=np.float64)
    if rx.shape != ry.shape or rx.ndim != 1:
        raise LengthMismatch(f"{rx.size} vs {ry.size} observations")
    scales = cfg.scales if cfg.scales is not None else default_scale_grid(rx.size)
    if rx.size < max(scales) + 1:
        raise ScaleTooLarge(
            f"series of length {rx.size} is too short for max scale {max(scales)}"
        )
    px = build_profile(rx)
    py = build_profile(ry)
    rows = [directional_fluctuations(px, py, rx, cfg, s) for s in scales]

    overall = _fit_exponent(scales, [r.f_all for r in rows], "overall")
    pos_pairs = [(r.scale, r.f_pos) for r in rows if r.f_pos is not None]
    neg_pairs = [(r.scale, r.f_neg) for r in rows if r.f_neg is not None]
    positive = _fit_exponent(
        [p[0] for p in pos_pairs], [p[1] for p in pos_pairs], "uptrend"
    )
    negative = _fit_exponent(
        [p[0] for p in neg_pairs], [p[1] for p in neg_pairs], "downtrend"
    )
    return HurstTriple(
        h_overall=overall.slope,
        h_positive=positive.slope,
        h_negative=negative.slope,
        fit_overall=overall,
        fit_positive=positive,
        fit_negative=negative,
    )


def rolling_window_count(n: int, window: int, stride: int) -> int:
    """Number of rolling windows: floor((n - window) / stride) + 1."""
    if window > n:
        raise TooShort(f"window {window} exceeds series length {n}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    return (n - window) // stride + 1


def rolling_hurst_features(
    rx,
    ry,
    window: int = 252,
    stride: int = 1,
    cfg: Optional[FractalConfig] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Rolling (h_overall, h_positive, h_negative) series.

    Window i covers observations [i*stride, i*stride + window); its estimate
    belongs at the window's last index (no look-ahead). Windows where the
    estimator fails (too few directional scales, flat data, implausible
    exponent) yield NaN in all three outputs; errors that would fail every
    window (bad configuration) raise instead.
    """
    cfg = cfg or FractalConfig()
    rx = np.asarray(rx, dtype=np.float64)
    ry = np.asarray(ry, dtype=np.float64)
    if rx.shape != ry.shape or rx.ndim != 1:
        raise LengthMismatch(f"{rx.size} vs {ry.size} observations")
    n_windows = rolling_window_count(rx.size, window, stride)
    scales = cfg.scales if cfg.scales is not None else default_scale_grid(window)
    if window < max(scales) + 1:
        raise ScaleTooLarge(
            f"rolling window {window} is too short for max scale {max(scales)}"
        )
    cfg = replace(cfg, scales=tuple(scales))

    h = np.full(n_windows, np.nan)
    h_pos = np.full(n_windows, np.nan)
    h_neg = np.full(n_windows, np.nan)
    finite = np.isfinite(rx) & np.isfinite(ry)
    for i in range(n_windows):
        lo = i * stride
        sl = slice(lo, lo + window)
        if not finite[sl].all():
            continue
        try:
            triple = mf_adcca(rx[sl], ry[sl], cfg)
        except (InsufficientScales, AllZeroFluctuations, EstimationFailure):
            continue
        h[i] = triple.h_overall
        h_pos[i] = triple.h_positive
        h_neg[i] = triple.h_negative
    return h, h_pos, h_neg
