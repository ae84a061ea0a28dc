"""Harmonic hole filling: every filled pixel converges to the mean of its
in-bounds 4-neighbors (red-black Gauss-Seidel), giving a smooth patch that
blends into the surrounding image.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NoBoundaryDataError
from .imagecore import ImageBuffer, Mask, dilate

_CHECK_EVERY = 16  # residual sampling interval, in full sweeps


@dataclass(frozen=True)
class InpaintConfig:
    pre_dilation: int = 3
    tolerance: float = 0.1
    max_iterations: int = 10000

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.pre_dilation < 0:
            raise ValueError("pre_dilation must be >= 0")


@dataclass(frozen=True)
class InpaintOutcome:
    """Filled image plus solver diagnostics.

    `converged` is False when the iteration budget ran out; `residual` is
    then the best max per-channel deviation from the 4-neighbor mean that
    was achieved.
    """

    image: ImageBuffer
    residual: float
    iterations: int
    converged: bool


def inpaint_diffusion(image: ImageBuffer, hole: Mask, config: InpaintConfig) -> InpaintOutcome:
    """Fill `hole` pixels from the surrounding image by diffusion.

    Pixels outside the hole are returned bit-identical; RGB channels inside
    are solved in float arithmetic and rounded once at the end. Alpha is
    left untouched.
    """
    if (hole.height, hole.width) != (image.height, image.width):
        raise ValueError(
            f"hole dimensions {hole.width}x{hole.height} do not match "
            f"image {image.width}x{image.height}"
        )
    bits = hole.bits
    if not bits.any():
        return InpaintOutcome(image.copy(), 0.0, 0, True)
    if bits.all():
        raise NoBoundaryDataError("hole covers every pixel: no boundary data to fill from")

    boundary = dilate(hole, 1).bits & ~bits
    out = image.pixels.copy()

    ys, xs = np.nonzero(bits)
    y0 = max(int(ys.min()) - 1, 0)
    y1 = min(int(ys.max()) + 2, image.height)
    x0 = max(int(xs.min()) - 1, 0)
    x1 = min(int(xs.max()) + 2, image.width)
    sub_hole = bits[y0:y1, x0:x1]

    residual = 0.0
    iterations = 0
    for c in range(3):
        chan = image.pixels[:, :, c].astype(np.float64)
        bvals = chan[boundary]
        chan[bits] = bvals.mean()  # deterministic initial guess
        sub = np.ascontiguousarray(chan[y0:y1, x0:x1])
        res_c, it_c = kernels.gauss_seidel_channel(
            sub, sub_hole, config.tolerance, config.max_iterations, _CHECK_EVERY
        )
        filled = sub[sub_hole]
        lo, hi = bvals.min(), bvals.max()
        if filled.min() < lo or filled.max() > hi:
            raise RuntimeError(
                "maximum principle violated: filled values escaped the boundary range"
            )
        chan[y0:y1, x0:x1] = sub
        out[:, :, c][bits] = np.clip(np.rint(chan[bits]), 0, 255).astype(np.uint8)
        residual = max(residual, float(res_c))
        iterations = max(iterations, int(it_c))
    return InpaintOutcome(
        ImageBuffer(out), residual, iterations, residual <= config.tolerance
    )


def make_background(image: ImageBuffer, subject: Mask, config: InpaintConfig) -> InpaintOutcome:
    """Background plate: grow the subject mask by `pre_dilation` (to wipe
    segmentation halo) and fill the grown hole.
    """
    grown = dilate(subject, config.pre_dilation)
    return inpaint_diffusion(image, grown, config)
