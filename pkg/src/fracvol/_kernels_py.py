"""NumPy implementations of the hot kernels.

This is the fallback backend used when the compiled extension is missing
(or when FRACVOL_PURE_PYTHON=1). The compiled backend must agree with these
functions to 1e-9 relative on segment reductions and bitwise on oscillator
trajectories; see backend.py for the contract and tests/test_backends.py
for the enforcement.

Batch/single consistency: every batch function here reduces along the last
axis of a C-contiguous array, which NumPy evaluates with the same pairwise
summation it uses for the corresponding single-segment call, so batch rows
are bitwise equal to one-at-a-time calls.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

BACKEND_NAME = "python"


def seg_fluct_one(px_seg, py_seg, basis) -> float:
    """Mean |rx * ry| over one segment after projecting out the basis columns."""
    x = np.asarray(px_seg, dtype=np.float64)
    y = np.asarray(py_seg, dtype=np.float64)
    rx = x.copy()
    ry = y.copy()
    for k in range(basis.shape[1]):
        col = basis[:, k]
        rx -= (x * col).sum() * col
        ry -= (y * col).sum() * col
    return float(np.abs(rx * ry).mean())


def seg_fluct_batch(px, py, starts, length: int, basis) -> np.ndarray:
    """seg_fluct_one over windows [start, start+length) of both profiles."""
    x = sliding_window_view(px, length)[starts]
    y = sliding_window_view(py, length)[starts]
    rx = x.copy()
    ry = y.copy()
    for k in range(basis.shape[1]):
        col = basis[:, k]
        rx -= (x * col).sum(axis=1)[:, None] * col
        ry -= (y * col).sum(axis=1)[:, None] * col
    return np.abs(rx * ry).mean(axis=1)


def dot_batch(series, starts, weights) -> np.ndarray:
    """weights . series[start:start+len(weights)] for each start."""
    windows = sliding_window_view(series, weights.size)[starts]
    return (windows * weights).sum(axis=1)


def lors_batch(
    xs,
    a1, a2, a3, a4,
    b1, b2, b3, b4,
    xi_e, xi_i,
    mu, k_decay, e_ratio,
    n_steps: int,
    init_e: float = 0.0,
    init_i: float = 0.0,
    init_l: float = 0.0,
    init_o: float = 0.0,
):
    """Run the oscillator n_steps times for every stimulus input in xs.

    Returns four (n_steps+1, len(xs)) arrays: excitatory E, inhibitory I,
    output L, retrograde O. Row 0 holds the initial state. The operation
    order below is the canonical one shared with the compiled kernel; do
    not reassociate terms.
    """
    x = np.asarray(xs, dtype=np.float64)
    s = x + e_ratio * np.tanh(x)
    decay = np.exp(-k_decay * s * s)
    omega = np.tanh(mu * s)

    n = x.size
    e_traj = np.empty((n_steps + 1, n))
    i_traj = np.empty((n_steps + 1, n))
    l_traj = np.empty((n_steps + 1, n))
    o_traj = np.empty((n_steps + 1, n))
    e = np.full(n, init_e)
    i = np.full(n, init_i)
    l = np.full(n, init_l)
    e_traj[0] = e
    i_traj[0] = i
    l_traj[0] = l
    o_traj[0] = init_o

    for t in range(1, n_steps + 1):
        e_new = np.tanh(mu * (a1 * l + a2 * e - a3 * i + a4 * s - xi_e))
        i_new = np.tanh(mu * (b1 * l - b2 * e - b3 * i + b4 * s - xi_i))
        l = (e_new - i_new) * decay + omega
        e = e_new
        i = i_new
        e_traj[t] = e
        i_traj[t] = i
        l_traj[t] = l
        o_traj[t] = omega
    return e_traj, i_traj, l_traj, o_traj
