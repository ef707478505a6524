"""Daily market features from intraday returns, plus leak-free scaling.

Conventions: returns are log returns in percent (100 * ln ratio). Realized
volatility RV = sum of squared intraday returns. Bipower variation
BPV = (pi/2) * sum |r_j| * |r_{j-1}| over adjacent intraday pairs, robust
to isolated jumps. The volatility increment is
v_t = ln sqrt(BPV_t) - ln sqrt(BPV_{t-1}) = (ln BPV_t - ln BPV_{t-1}) / 2.

Min-max scaling is fitted on training rows only; later rows reuse the
training bounds unclamped, so nothing about validation or test data can
leak into the transform.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    ConstantFeature,
    EmptyDay,
    LengthMismatch,
    NonPositiveBPV,
    NonPositivePrice,
    TooFewReturns,
    TooShort,
)


@dataclass(frozen=True)
class DailySeries:
    """Aligned (dates, values) with strictly increasing dates."""

    dates: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=np.float64)
        if dates.size != values.size:
            raise LengthMismatch(f"{dates.size} dates vs {values.size} values")
        if dates.size > 1 and np.any(np.diff(dates).astype(int) <= 0):
            raise ValueError("dates must be strictly increasing")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class IntradayDay:
    """One trading day's intraday log returns, in percent."""

    date: str
    returns: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "returns", np.asarray(self.returns, dtype=np.float64)
        )


def log_returns(prices: DailySeries) -> DailySeries:
    """r_t = 100 * (ln P_t - ln P_{t-1}); one element shorter than prices."""
    p = prices.values
    if p.size < 2:
        raise TooShort("need at least 2 prices for a return")
    bad = np.nonzero(p <= 0)[0]
    if bad.size:
        raise NonPositivePrice(f"non-positive price at position {bad[0]}")
    r = 100.0 * np.diff(np.log(p))
    return DailySeries(dates=prices.dates[1:], values=r)


def realized_volatility(day: IntradayDay) -> float:
    """Sum of squared intraday returns."""
    r = day.returns
    if r.size == 0:
        raise EmptyDay(f"day {day.date} has no returns")
    return float(r @ r)


def bipower_variation(day: IntradayDay) -> float:
    """(pi/2) * sum of |r_j| * |r_{j-1}| over adjacent intraday returns."""
    r = day.returns
    if r.size < 2:
        raise TooFewReturns(
            f"day {day.date} has {r.size} returns; bipower variation needs 2"
        )
    return float(math.pi / 2.0 * np.sum(np.abs(r[1:]) * np.abs(r[:-1])))


def volatility_increment(bpv: DailySeries) -> DailySeries:
    """v_t = (ln BPV_t - ln BPV_{t-1}) / 2; one element shorter than input.

    Zero entries are replaced by the smallest positive entry (with a
    warning) so occasional flat synthetic days keep the series defined;
    negative or all-zero input raises NonPositiveBPV.
    """
    b = bpv.values
    if b.size < 2:
        raise TooShort("need at least 2 days of bipower variation")
    if np.any(b < 0):
        raise NonPositiveBPV("negative bipower variation")
    if np.any(b == 0):
        positive = b[b > 0]
        if positive.size == 0:
            raise NonPositiveBPV("all-zero bipower variation series")
        warnings.warn(
            f"replacing {int((b == 0).sum())} zero bipower values with the "
            f"sample minimum {positive.min():.3g}",
            stacklevel=2,
        )
        b = np.where(b == 0, positive.min(), b)
    v = 0.5 * np.diff(np.log(b))
    return DailySeries(dates=bpv.dates[1:], values=v)


# ---------------------------------------------------------------------------
# min-max scaling


@dataclass(frozen=True)
class MinMaxScaler:
    x_min: np.ndarray
    x_max: np.ndarray


def minmax_fit(train_rows) -> MinMaxScaler:
    """Per-feature bounds from training rows only."""
    rows = np.atleast_2d(np.asarray(train_rows, dtype=np.float64))
    if rows.size == 0:
        raise ValueError("cannot fit a scaler on zero rows")
    x_min = rows.min(axis=0)
    x_max = rows.max(axis=0)
    flat = np.nonzero(x_max == x_min)[0]
    if flat.size:
        raise ConstantFeature(f"feature {flat[0]} is constant on the training rows")
    return MinMaxScaler(x_min=x_min, x_max=x_max)


def minmax_apply(scaler: MinMaxScaler, rows) -> np.ndarray:
    """(x - x_min) / (x_max - x_min); unclamped, so rows outside the training
    range map outside [0, 1]."""
    rows = np.asarray(rows, dtype=np.float64)
    return (rows - scaler.x_min) / (scaler.x_max - scaler.x_min)


def minmax_inverse(scaler: MinMaxScaler, rows) -> np.ndarray:
    rows = np.asarray(rows, dtype=np.float64)
    return rows * (scaler.x_max - scaler.x_min) + scaler.x_min


# ---------------------------------------------------------------------------
# daily feature assembly


def daily_features(
    days: Sequence[IntradayDay],
    closes: Optional[np.ndarray] = None,
):
    """Per-day rv/bpv/r/v columns from intraday days.

    The daily return r is close-to-close (needs `closes`, one per day) when
    prices are available, otherwise the within-day sum of intraday returns.
    The first day is dropped: r (close-to-close) and v both need a prior
    day. Returns (dates, rv, bpv, r, v) aligned arrays for days[1:].
    """
    if len(days) < 2:
        raise TooShort("need at least 2 days to build the feature table")
    dates = np.array([d.date for d in days], dtype="datetime64[D]")
    rv = np.array([realized_volatility(d) for d in days])
    bpv = np.array([bipower_variation(d) for d in days])
    if closes is not None:
        closes = np.asarray(closes, dtype=np.float64)
        if closes.size != len(days):
            raise LengthMismatch(f"{closes.size} closes vs {len(days)} days")
        r = log_returns(DailySeries(dates=dates, values=closes)).values
    else:
        r = np.array([float(d.returns.sum()) for d in days])[1:]
    v = volatility_increment(DailySeries(dates=dates, values=bpv)).values
    return dates[1:], rv[1:], bpv[1:], r, v
