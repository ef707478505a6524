"""Seeded synthetic generators used as oracles and smoke-test data.

All randomness flows through numpy's Philox counter-based generator keyed
directly with the caller's seed (Generator(Philox(key=seed))), so streams
are reproducible bitwise for a given numpy version and specifiable across
implementations.

gen_fgn synthesizes fractional Gaussian noise by circulant embedding of
the exact autocovariance gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})/2
(spectral/Davies-Harte method): exact target covariance, O(n log n), one
code path for every H in (0, 1).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidH, NonStationaryParams, TooShort
from .market import IntradayDay
from .numerics import slope_weights

_COMPANION_OFFSET = 0x9E3779B97F4A7C15  # fixed odd constant; decorrelates streams


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def gen_fgn(H: float, n: int, seed: int) -> np.ndarray:
    """Fractional Gaussian noise with Hurst exponent H, length n, unit variance."""
    if not 0.0 < H < 1.0:
        raise InvalidH(f"H must lie in (0, 1), got {H}")
    if n < 2:
        raise TooShort(f"need n >= 2, got {n}")
    m = 1
    while m < n:
        m *= 2
    k = np.arange(m + 1, dtype=np.float64)
    gamma = 0.5 * ((k + 1.0) ** (2 * H) - 2.0 * k ** (2 * H) + np.abs(k - 1.0) ** (2 * H))
    circ = np.concatenate([gamma, gamma[m - 1:0:-1]])
    lam = np.fft.fft(circ).real
    # exact embedding is nonnegative for fGn; clip the rounding dust
    lam[lam < 0.0] = 0.0

    rng = _rng(seed)
    size = 2 * m
    z = np.zeros(size, dtype=np.complex128)
    z[0] = rng.standard_normal()
    z[m] = rng.standard_normal()
    pairs = rng.standard_normal((m - 1, 2))
    z[1:m] = (pairs[:, 0] + 1j * pairs[:, 1]) / np.sqrt(2.0)
    z[m + 1:] = np.conj(z[1:m][::-1])
    x = np.fft.ifft(np.sqrt(lam) * z) * np.sqrt(size)
    return np.ascontiguousarray(x.real[:n])


def gen_garch_intraday(
    omega: float,
    alpha: float,
    beta: float,
    days: int,
    m_per_day: int,
    seed: int,
) -> list[IntradayDay]:
    """GARCH(1,1) returns sliced into days of m_per_day intraday returns.

    r_j = sqrt(h_j) * z_j with h_{j+1} = omega + alpha * r_j^2 + beta * h_j,
    started at the unconditional variance omega / (1 - alpha - beta).
    Volatility persistence carries across day boundaries, so daily realized
    volatility inherits positive autocorrelation.
    """
    if omega < 0 or alpha < 0 or beta < 0:
        raise NonStationaryParams("omega, alpha, beta must be nonnegative")
    if alpha + beta >= 1.0:
        raise NonStationaryParams(
            f"alpha + beta = {alpha + beta} >= 1 breaks stationarity"
        )
    if days < 1 or m_per_day < 2:
        raise TooShort("need days >= 1 and m_per_day >= 2")
    total = days * m_per_day
    z = _rng(seed).standard_normal(total)
    r = np.empty(total)
    h = omega / (1.0 - alpha - beta) if alpha + beta > 0 else omega
    for j in range(total):
        r[j] = np.sqrt(h) * z[j]
        h = omega + alpha * r[j] * r[j] + beta * h
    start = np.datetime64("2000-01-03")
    return [
        IntradayDay(
            date=str(start + np.timedelta64(d, "D")),
            returns=r[d * m_per_day:(d + 1) * m_per_day],
        )
        for d in range(days)
    ]


def rolling_trend_slope(x: np.ndarray, window: int) -> np.ndarray:
    """Centered rolling least-squares slope, edges held at the first/last
    full-window value. Output length matches the input."""
    x = np.asarray(x, dtype=np.float64)
    w = min(window, x.size)
    weights = slope_weights(w)
    core = np.convolve(x, weights[::-1], mode="valid")
    lead = (w - 1) // 2
    out = np.empty_like(x)
    out[lead:lead + core.size] = core
    out[:lead] = core[0]
    out[lead + core.size:] = core[-1]
    return out


def gen_asymmetric_vol(
    base_H: float,
    downtrend_amp: float,
    n: int,
    seed: int,
    trend_window: int = 256,
    companion_corr: float = 0.7,
) -> tuple[np.ndarray, np.ndarray]:
    """Correlated fGn pair whose fluctuations are amplified by downtrend_amp
    wherever the rolling linear trend of rx is negative.

    The amplification mask keys on the rolling slope (the same quantity the
    fractal estimator classifies windows by), so the downtrend fluctuation
    class scales differently from the uptrend class: on scale grids below
    about 2 * trend_window, h_negative rises above h_positive, increasingly
    with downtrend_amp. downtrend_amp=1 leaves the pair untouched.
    """
    if downtrend_amp < 1.0:
        raise ValueError(f"downtrend_amp must be >= 1, got {downtrend_amp}")
    rx = gen_fgn(base_H, n, seed)
    companion = gen_fgn(base_H, n, seed + _COMPANION_OFFSET)
    ry = companion_corr * rx + np.sqrt(1.0 - companion_corr**2) * companion
    gain = np.where(rolling_trend_slope(rx, trend_window) < 0.0, downtrend_amp, 1.0)
    return rx * gain, ry * gain
