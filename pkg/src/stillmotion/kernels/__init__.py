"""Hot numeric kernels with two interchangeable backends.

The numba backend (``jit``) is the default; set STILLMOTION_BACKEND=numpy
to force the pure-numpy fallback, or STILLMOTION_BACKEND=numba to fail
loudly if numba is unavailable. Both backends are bit-identical; see
benchmarks/bench_kernels.py for the speed comparison.
"""

import os

from . import cpu


def _pick_backend():
    choice = os.environ.get("STILLMOTION_BACKEND", "auto").strip().lower()
    if choice in ("", "auto"):
        try:
            from . import jit
            return jit
        except ImportError:
            return cpu
    if choice == "numpy":
        return cpu
    if choice == "numba":
        from . import jit
        return jit
    raise ValueError(
        f"STILLMOTION_BACKEND must be 'numba', 'numpy' or 'auto', got {choice!r}"
    )


_impl = _pick_backend()

BACKEND = _impl.NAME

min_distance_field = _impl.min_distance_field
gauss_seidel_channel = _impl.gauss_seidel_channel
rasterize_rgba = _impl.rasterize_rgba
nms_mask = _impl.nms_mask
hysteresis = _impl.hysteresis
label4 = _impl.label4
lzw_encode = _impl.lzw_encode
assign_labels = _impl.assign_labels
