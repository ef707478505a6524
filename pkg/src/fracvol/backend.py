"""Kernel backend selection.

The compiled extension is preferred when importable; the NumPy fallback is
used otherwise. Set FRACVOL_PURE_PYTHON=1 to force the fallback.

Contract between backends (enforced by tests/test_backends.py):
  - every kernel is bitwise deterministic within a backend: repeat calls,
    thread counts, and batch-vs-single-element paths all agree exactly;
  - seg_fluct_* / dot_batch: cross-backend agreement to 1e-9 relative
    (summation order is the only difference; measured ~1e-15);
  - lors_batch: both backends evaluate the same update expressions in the
    same operation order (the extension is built with FP contraction off),
    but libm's scalar tanh/exp and NumPy's vectorized ones differ by ~1 ulp.
    Contractive parameterizations still agree to ~1e-12; chaotic ones
    amplify the ulp gap exponentially, so trajectories decorrelate and only
    coarse agreement of max-over-time summaries (~1e-2) holds there.
    Cross-backend bitwise equality of trajectories is therefore NOT part of
    the contract; bitwise determinism is guaranteed per backend.
"""

from __future__ import annotations

import os

if os.environ.get("FRACVOL_PURE_PYTHON", "") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

backend_name: str = _impl.BACKEND_NAME

seg_fluct_one = _impl.seg_fluct_one
seg_fluct_batch = _impl.seg_fluct_batch
dot_batch = _impl.dot_batch
lors_batch = _impl.lors_batch
