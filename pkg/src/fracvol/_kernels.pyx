# cython: language_level=3
"""Compiled implementations of the hot kernels.

Must match _kernels_py.py: bitwise on oscillator trajectories (identical
libm calls in identical order; the build disables FP contraction so no FMA
reassociation sneaks in) and to 1e-9 relative on segment reductions (the
only difference there is sequential vs pairwise summation order).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, tanh

cnp.import_array()

BACKEND_NAME = "compiled"


cdef double _seg_fluct(const double[::1] x, const double[::1] y,
                       const double[:, ::1] basis,
                       double[::1] rx, double[::1] ry) noexcept nogil:
    cdef Py_ssize_t s = x.shape[0]
    cdef Py_ssize_t n_cols = basis.shape[1]
    cdef Py_ssize_t i, k
    cdef double cx, cy, acc
    for i in range(s):
        rx[i] = x[i]
        ry[i] = y[i]
    for k in range(n_cols):
        cx = 0.0
        cy = 0.0
        for i in range(s):
            cx += x[i] * basis[i, k]
            cy += y[i] * basis[i, k]
        for i in range(s):
            rx[i] -= cx * basis[i, k]
            ry[i] -= cy * basis[i, k]
    acc = 0.0
    for i in range(s):
        acc += fabs(rx[i] * ry[i])
    return acc / s


def seg_fluct_one(px_seg, py_seg, basis):
    """Mean |rx * ry| over one segment after projecting out the basis columns."""
    cdef const double[::1] x = np.ascontiguousarray(px_seg, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(py_seg, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(basis, dtype=np.float64)
    cdef double[::1] rx = np.empty(x.shape[0])
    cdef double[::1] ry = np.empty(x.shape[0])
    return _seg_fluct(x, y, q, rx, ry)


def seg_fluct_batch(px, py, starts, Py_ssize_t length, basis):
    """seg_fluct_one over windows [start, start+length) of both profiles."""
    cdef const double[::1] x = np.ascontiguousarray(px, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(py, dtype=np.float64)
    cdef const Py_ssize_t[::1] st = np.ascontiguousarray(starts, dtype=np.intp)
    cdef const double[:, ::1] q = np.ascontiguousarray(basis, dtype=np.float64)
    cdef Py_ssize_t n_seg = st.shape[0]
    out_arr = np.empty(n_seg)
    cdef double[::1] out = out_arr
    cdef double[::1] rx = np.empty(length)
    cdef double[::1] ry = np.empty(length)
    cdef Py_ssize_t j, s0
    for j in range(n_seg):
        s0 = st[j]
        out[j] = _seg_fluct(x[s0:s0 + length], y[s0:s0 + length], q, rx, ry)
    return out_arr


def dot_batch(series, starts, weights):
    """weights . series[start:start+len(weights)] for each start."""
    cdef const double[::1] x = np.ascontiguousarray(series, dtype=np.float64)
    cdef const Py_ssize_t[::1] st = np.ascontiguousarray(starts, dtype=np.intp)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n_seg = st.shape[0]
    cdef Py_ssize_t m = w.shape[0]
    out_arr = np.empty(n_seg)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t j, i, s0
    cdef double acc
    for j in range(n_seg):
        s0 = st[j]
        acc = 0.0
        for i in range(m):
            acc += x[s0 + i] * w[i]
        out[j] = acc
    return out_arr


def lors_batch(xs,
               double a1, double a2, double a3, double a4,
               double b1, double b2, double b3, double b4,
               double xi_e, double xi_i,
               double mu, double k_decay, double e_ratio,
               Py_ssize_t n_steps,
               double init_e=0.0, double init_i=0.0,
               double init_l=0.0, double init_o=0.0):
    """Run the oscillator n_steps times for every stimulus input in xs.

    Same output layout and operation order as the NumPy twin.
    """
    cdef const double[::1] x = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0]
    e_arr = np.empty((n_steps + 1, n))
    i_arr = np.empty((n_steps + 1, n))
    l_arr = np.empty((n_steps + 1, n))
    o_arr = np.empty((n_steps + 1, n))
    cdef double[:, ::1] ev = e_arr
    cdef double[:, ::1] iv = i_arr
    cdef double[:, ::1] lv = l_arr
    cdef double[:, ::1] ov = o_arr
    cdef Py_ssize_t j, t
    cdef double s, decay, omega, e, i, l, e_new, i_new
    with nogil:
        for j in range(n):
            s = x[j] + e_ratio * tanh(x[j])
            decay = exp(-k_decay * s * s)
            omega = tanh(mu * s)
            e = init_e
            i = init_i
            l = init_l
            ev[0, j] = e
            iv[0, j] = i
            lv[0, j] = l
            ov[0, j] = init_o
            for t in range(1, n_steps + 1):
                e_new = tanh(mu * (a1 * l + a2 * e - a3 * i + a4 * s - xi_e))
                i_new = tanh(mu * (b1 * l - b2 * e - b3 * i + b4 * s - xi_i))
                l = (e_new - i_new) * decay + omega
                e = e_new
                i = i_new
                ev[t, j] = e
                iv[t, j] = i
                lv[t, j] = l
                ov[t, j] = omega
    return e_arr, i_arr, l_arr, o_arr
