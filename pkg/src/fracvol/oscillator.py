"""Chaotic oscillator dynamics, meta-activations, and the lookup-table
activation built from them.

One oscillator is a four-variable discrete map driven by a constant
stimulus S = i + e_ratio * tanh(i):

    E'    = tanh(mu * (a1*L + a2*E - a3*I + a4*S - xi_e))
    I'    = tanh(mu * (b1*L - b2*E - b3*I + b4*S - xi_i))
    Omega = tanh(mu * S)
    L'    = (E' - I') * exp(-k_decay * S^2) + Omega

All right-hand sides read the pre-step state (simultaneous update). With
zero initial state and zero thresholds the map is odd in the input, the
origin is a fixed point, and |L| <= 2*exp(-k_decay*S^2) + 1 <= 3 always.

The meta-activation of an oscillator is max over steps 1..n_steps of L at
constant input x (max-over-time pooling; step 0 is the initial state and
is excluded). The winner-takes-all envelope over a library of oscillators
is sampled at uniform knots into a piecewise-linear lookup table whose
interval slopes double as the training derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import backend
from .errors import EmptyLibrary, InvalidDomain, UnknownType


@dataclass(frozen=True)
class OscillatorParams:
    a1: float
    a2: float
    a3: float
    a4: float
    b1: float
    b2: float
    b3: float
    b4: float
    mu: float = 1.0
    k_decay: float = 50.0
    e_ratio: float = 0.001
    xi_e: float = 0.0
    xi_i: float = 0.0
    label: str = "custom"

    def as_tuple(self) -> tuple:
        return (
            self.a1, self.a2, self.a3, self.a4,
            self.b1, self.b2, self.b3, self.b4,
            self.xi_e, self.xi_i,
            self.mu, self.k_decay, self.e_ratio,
        )


@dataclass(frozen=True)
class OscillatorState:
    E: float = 0.0
    I: float = 0.0
    LORS: float = 0.0
    Omega: float = 0.0


ZERO_STATE = OscillatorState()

# The ten built-in parameter rows. All share e_ratio=0.001 and zero
# thresholds; mu=1 except type 1.
_BUILTIN: dict[int, OscillatorParams] = {
    1: OscillatorParams(0.0, 5.0, 5.0, 1.0, 0.0, -1.0, 1.0, 0.0,
                        mu=5.0, k_decay=500.0, label="T1"),
    2: OscillatorParams(0.5, 0.55, 0.55, -0.5, 0.5, -0.55, -0.55, -0.5,
                        k_decay=50.0, label="T2"),
    3: OscillatorParams(0.5, 0.6, 0.55, 0.5, -0.5, -0.6, -0.55, 0.5,
                        k_decay=50.0, label="T3"),
    4: OscillatorParams(-0.5, 0.55, 0.55, -0.5, -0.5, -0.55, -0.55, 0.5,
                        k_decay=50.0, label="T4"),
    5: OscillatorParams(-0.9, 0.9, 0.9, -0.9, 0.9, -0.9, -0.9, 0.9,
                        k_decay=50.0, label="T5"),
    6: OscillatorParams(-0.9, 0.9, 0.9, -0.9, 0.9, -0.9, -0.9, 0.9,
                        k_decay=300.0, label="T6"),
    7: OscillatorParams(-5.0, 5.0, 5.0, -5.0, 1.0, -1.0, -1.0, 1.0,
                        k_decay=50.0, label="T7"),
    8: OscillatorParams(-5.0, 5.0, 5.0, -5.0, 1.0, -1.0, -1.0, 1.0,
                        k_decay=300.0, label="T8"),
    9: OscillatorParams(1.0, -1.0, -1.0, -1.0, -1.0, 2.0, 2.0, -1.0,
                        k_decay=50.0, label="T9"),
    10: OscillatorParams(3.0, 3.0, 3.0, 2.0, 0.45, -0.45, -0.45, 1.0,
                         k_decay=50.0, label="T10"),
}

N_STEPS_DEFAULT = 100


def builtin_params(type_id: int) -> OscillatorParams:
    """Parameter row for one of the ten built-in oscillator types (1..10)."""
    params = _BUILTIN.get(type_id)
    if params is None:
        raise UnknownType(f"no built-in oscillator type {type_id!r}; valid: 1..10")
    return params


def builtin_library() -> list[OscillatorParams]:
    return [_BUILTIN[i] for i in range(1, 11)]


def stimulus(i: float, p: OscillatorParams) -> float:
    """S = i + e_ratio * tanh(i), constant over a run."""
    return i + p.e_ratio * math.tanh(i)


def step(state: OscillatorState, p: OscillatorParams, S: float) -> OscillatorState:
    """One simultaneous update from the pre-step state."""
    e_new = math.tanh(p.mu * (p.a1 * state.LORS + p.a2 * state.E - p.a3 * state.I
                              + p.a4 * S - p.xi_e))
    i_new = math.tanh(p.mu * (p.b1 * state.LORS - p.b2 * state.E - p.b3 * state.I
                              + p.b4 * S - p.xi_i))
    omega = math.tanh(p.mu * S)
    lors = (e_new - i_new) * math.exp(-p.k_decay * S * S) + omega
    return OscillatorState(E=e_new, I=i_new, LORS=lors, Omega=omega)


@dataclass(frozen=True)
class Trajectory:
    states: list[OscillatorState]
    input_value: float
    stimulus: float

    @property
    def lors(self) -> np.ndarray:
        return np.array([s.LORS for s in self.states])


def run_oscillator(
    i: float,
    p: OscillatorParams,
    n_steps: int = N_STEPS_DEFAULT,
    init: Optional[OscillatorState] = None,
) -> Trajectory:
    """Full state history over n_steps at constant input i (index 0 = init)."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    init = init or ZERO_STATE
    e, it, lt, ot = backend.lors_batch(
        np.array([float(i)]), *p.as_tuple(), n_steps,
        init.E, init.I, init.LORS, init.Omega,
    )
    states = [
        OscillatorState(E=e[t, 0], I=it[t, 0], LORS=lt[t, 0], Omega=ot[t, 0])
        for t in range(n_steps + 1)
    ]
    return Trajectory(states=states, input_value=float(i), stimulus=stimulus(i, p))


def _lors_rows(xs: np.ndarray, p: OscillatorParams, n_steps: int,
               init: OscillatorState) -> np.ndarray:
    """(n_steps+1, len(xs)) LORS history for a batch of inputs."""
    _, _, lt, _ = backend.lors_batch(
        xs, *p.as_tuple(), n_steps, init.E, init.I, init.LORS, init.Omega
    )
    return lt


def meta_activation(
    x: float,
    p: OscillatorParams,
    n_steps: int = N_STEPS_DEFAULT,
    init: Optional[OscillatorState] = None,
) -> float:
    """max over steps 1..n_steps of the LORS output at constant input x."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    lt = _lors_rows(np.array([float(x)]), p, n_steps, init or ZERO_STATE)
    return float(lt[1:, 0].max())


def generate_meta_activations(
    x: float,
    library: Optional[Sequence[OscillatorParams]] = None,
    n_steps: int = N_STEPS_DEFAULT,
) -> np.ndarray:
    """Meta-activation of x under every library member, in library order."""
    library = builtin_library() if library is None else list(library)
    if not library:
        raise EmptyLibrary("oscillator library is empty")
    return np.array([meta_activation(x, p, n_steps) for p in library])


def max_select(activations) -> float:
    """Winner-takes-all: the maximum activation."""
    values = np.asarray(activations, dtype=np.float64)
    if values.size == 0:
        raise EmptyLibrary("cannot select from an empty activation vector")
    return float(values.max())


@dataclass(frozen=True)
class MetaActivationLUT:
    """Piecewise-linear table of the per-type meta-activations and their
    winner-takes-all envelope.

    envelope_slopes/envelope_offsets describe interval j as
    value(x) = slopes[j] * x + offsets[j] for knots[j] <= x < knots[j+1];
    storing (slope, offset) instead of anchoring at the left knot keeps an
    identity-valued table exactly the identity map.
    """

    x_lo: float
    x_hi: float
    knots: np.ndarray
    per_type_values: np.ndarray
    envelope_values: np.ndarray
    envelope_slopes: np.ndarray
    envelope_offsets: np.ndarray
    labels: tuple[str, ...] = field(default=())

    @classmethod
    def from_samples(cls, knots, per_type_values, labels=()) -> "MetaActivationLUT":
        knots = np.asarray(knots, dtype=np.float64)
        per_type = np.atleast_2d(np.asarray(per_type_values, dtype=np.float64))
        if knots.size < 2:
            raise InvalidDomain("need at least 2 knots")
        if np.any(np.diff(knots) <= 0):
            raise InvalidDomain("knots must be strictly increasing")
        if per_type.shape[1] != knots.size:
            raise InvalidDomain(
                f"{per_type.shape[1]} samples per row vs {knots.size} knots"
            )
        envelope = per_type.max(axis=0)
        widths = knots[1:] - knots[:-1]
        slopes = (envelope[1:] - envelope[:-1]) / widths
        offsets = envelope[:-1] - slopes * knots[:-1]
        return cls(
            x_lo=float(knots[0]),
            x_hi=float(knots[-1]),
            knots=knots,
            per_type_values=per_type,
            envelope_values=envelope,
            envelope_slopes=slopes,
            envelope_offsets=offsets,
            labels=tuple(labels),
        )


def build_lut(
    library: Optional[Sequence[OscillatorParams]] = None,
    x_lo: float = -2.0,
    x_hi: float = 2.0,
    n_knots: int = 4001,
    n_steps: int = N_STEPS_DEFAULT,
) -> MetaActivationLUT:
    """Sample every library member's meta-activation at uniform knots."""
    if not x_lo < x_hi:
        raise InvalidDomain(f"empty domain [{x_lo}, {x_hi}]")
    if n_knots < 2:
        raise InvalidDomain("need at least 2 knots")
    library = builtin_library() if library is None else list(library)
    if not library:
        raise EmptyLibrary("oscillator library is empty")
    knots = np.linspace(x_lo, x_hi, n_knots)
    rows = np.empty((len(library), n_knots))
    for row, p in enumerate(library):
        lt = _lors_rows(knots, p, n_steps, ZERO_STATE)
        rows[row] = lt[1:].max(axis=0)
    return MetaActivationLUT.from_samples(
        knots, rows, labels=tuple(p.label for p in library)
    )


def lut_activation(lut: MetaActivationLUT, x: float) -> tuple[float, float]:
    """(value, slope) of the envelope at x.

    Exact knots return the stored value and the right interval's slope;
    outside the domain the value clamps to the boundary knot and the slope
    is 0. The last knot counts as clamped (it has no right interval).
    """
    k = lut.knots
    if x < k[0]:
        return float(lut.envelope_values[0]), 0.0
    if x >= k[-1]:
        return float(lut.envelope_values[-1]), 0.0
    idx = int(np.searchsorted(k, x, side="right")) - 1
    slope = float(lut.envelope_slopes[idx])
    if x == k[idx]:
        return float(lut.envelope_values[idx]), slope
    return float(lut.envelope_slopes[idx] * x + lut.envelope_offsets[idx]), slope


def lut_activation_batch(lut: MetaActivationLUT, xs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized lut_activation; elementwise identical to the scalar form."""
    x = np.asarray(xs, dtype=np.float64)
    k = lut.knots
    env = lut.envelope_values
    idx = np.searchsorted(k, x, side="right") - 1
    idx = np.clip(idx, 0, k.size - 2)
    value = lut.envelope_slopes[idx] * x + lut.envelope_offsets[idx]
    slope = lut.envelope_slopes[idx].copy()
    at_knot = x == k[idx]
    value = np.where(at_knot, env[idx], value)
    lo = x < k[0]
    hi = x >= k[-1]
    value = np.where(lo, env[0], value)
    slope = np.where(lo, 0.0, slope)
    value = np.where(hi, env[-1], value)
    slope = np.where(hi, 0.0, slope)
    return value, slope


def bifurcation_diagram(
    p: OscillatorParams,
    input_grid,
    n_steps: int = N_STEPS_DEFAULT,
    n_discard: int = 50,
) -> np.ndarray:
    """Post-transient (input, LORS) point cloud over an input grid.

    Steps n_discard+1 .. n_steps are emitted per input; rows are grouped by
    input in grid order. Returns an (n_points, 2) array.
    """
    if n_discard >= n_steps:
        raise ValueError(f"n_discard={n_discard} must be < n_steps={n_steps}")
    grid = np.asarray(input_grid, dtype=np.float64)
    lt = _lors_rows(grid, p, n_steps, ZERO_STATE)
    post = lt[n_discard + 1:]
    n_kept = post.shape[0]
    return np.column_stack([np.repeat(grid, n_kept), post.T.ravel()])
