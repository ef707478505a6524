"""Benchmark the compiled kernels against the NumPy fallback.

Usage:
    python3 benchmarks/bench_kernels.py [--repeats N]

Times the two kernel primitives that dominate runtime (windowed residual
products and oscillator integration), then the end-to-end paths built on
them. The end-to-end rows retarget the functions re-exported by
fracvol.backend, which is the same indirection the library itself goes
through, so the numbers include all Python-side orchestration.
"""

from __future__ import annotations

import argparse
import contextlib
import time

import numpy as np

from fracvol import _kernels_py, backend, oscillator
from fracvol.fractal import mf_adcca, segment_overlapping
from fracvol.numerics import detrend_basis, slope_weights
from fracvol.synthetic import gen_fgn

try:
    from fracvol import _kernels
except ImportError:
    _kernels = None

SWAPPED = ("seg_fluct_one", "seg_fluct_batch", "dot_batch", "lors_batch")


@contextlib.contextmanager
def use_impl(impl):
    """Point fracvol.backend's re-exports at one kernel module."""
    saved = {name: getattr(backend, name) for name in SWAPPED}
    for name in SWAPPED:
        setattr(backend, name, getattr(impl, name))
    try:
        yield
    finally:
        for name, fn in saved.items():
            setattr(backend, name, fn)


def best_of(fn, repeats: int) -> float:
    fn()  # warmup
    return min(
        (lambda t0: (fn(), time.perf_counter() - t0)[1])(time.perf_counter())
        for _ in range(repeats)
    )


def build_cases():
    rng = np.random.Generator(np.random.Philox(key=7))
    n, s = 16384, 128
    px = np.cumsum(rng.standard_normal(n))
    py = np.cumsum(rng.standard_normal(n))
    starts = np.array(
        [st for st, _ in segment_overlapping(n, s, 1.0 / 3.0)], dtype=np.intp
    )
    basis = detrend_basis(s, 2)
    weights = slope_weights(s)

    xs = np.linspace(-2.0, 2.0, 4001)
    one = np.array([0.37])
    params = oscillator.builtin_library()[1].as_tuple()

    rx = gen_fgn(0.55, 8192, seed=1)
    ry = gen_fgn(0.65, 8192, seed=2)

    kernel_cases = [
        (
            f"seg_fluct_batch  n={n} s={s} ({starts.size} windows)",
            lambda impl: impl.seg_fluct_batch(px, py, starts, s, basis),
        ),
        (
            f"dot_batch        n={n} s={s}",
            lambda impl: impl.dot_batch(px, starts, weights),
        ),
        (
            "lors_batch       4001 inputs x 100 steps",
            lambda impl: impl.lors_batch(xs, *params, 100),
        ),
        # narrow batches are the shape meta_activation() feeds the kernel
        (
            "lors_batch       1 input x 100 steps",
            lambda impl: impl.lors_batch(one, *params, 100),
        ),
    ]
    e2e_cases = [
        ("mf_adcca         n=8192, default scales", lambda: mf_adcca(rx, ry)),
        ("build_lut        10 types x 4001 knots", oscillator.build_lut),
    ]
    return kernel_cases, e2e_cases


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5, help="best-of count")
    args = parser.parse_args(argv)

    impls = [("python", _kernels_py)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))
    else:
        print("compiled extension not importable; timing the fallback only\n")

    print(f"active default backend: {backend.backend_name}")
    print(f"best of {args.repeats} runs, seconds\n")
    header = f"{'case':<46}" + "".join(f"{name:>12}" for name, _ in impls)
    if _kernels is not None:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    kernel_cases, e2e_cases = build_cases()
    for label, call in kernel_cases:
        times = [best_of(lambda: call(impl), args.repeats) for _, impl in impls]
        row = f"{label:<46}" + "".join(f"{t:>12.6f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)
    for label, call in e2e_cases:
        times = []
        for _, impl in impls:
            with use_impl(impl):
                times.append(best_of(call, args.repeats))
        row = f"{label:<46}" + "".join(f"{t:>12.6f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
