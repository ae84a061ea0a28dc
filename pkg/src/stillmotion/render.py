"""Rasterize textured meshes into frames and composite the deformed
subject over the inpainted background plate.

The rasterizer covers each pixel center exactly once per watertight mesh
(top-left fill rule), so a rest grid mesh with aligned uvs reproduces its
texture bit-exactly under nearest sampling.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gif, kernels
from .imagecore import ImageBuffer, Mask, load_image, save_image
from .meshanim import Mesh, make_grid_mesh

SAMPLING_MODES = ("nearest", "bilinear")

DEFAULT_SUBJECT_CELLS = (24, 24)
DEFAULT_BACKGROUND_CELLS = (2, 2)


@dataclass(frozen=True)
class Scene:
    """Render inputs: inpainted plate, subject texture (mask in alpha),
    and the two overlapping meshes.
    """

    background: ImageBuffer
    subject_texture: ImageBuffer
    background_mesh: Mesh
    subject_rest_mesh: Mesh

    def __post_init__(self):
        if (self.background.width, self.background.height) != (
            self.subject_texture.width,
            self.subject_texture.height,
        ):
            raise ValueError("background and subject texture dimensions differ")
        alpha = self.subject_texture.pixels[:, :, 3]
        if not np.isin(alpha, (0, 255)).all():
            raise ValueError("subject texture alpha must be exactly 0 or 255")


@dataclass(frozen=True)
class Frame:
    index: int
    image: ImageBuffer


def rasterize_mesh(
    mesh: Mesh,
    texture: ImageBuffer,
    target: ImageBuffer,
    sampling: str = "nearest",
) -> ImageBuffer:
    """Draw `mesh` textured by `texture` over a copy of `target`.

    Covered pixels blend source-over (rounding ties to even); uncovered
    pixels pass through untouched.
    """
    out, _ = rasterize_with_coverage(mesh, texture, target, sampling)
    return out


def rasterize_with_coverage(
    mesh: Mesh,
    texture: ImageBuffer,
    target: ImageBuffer,
    sampling: str = "nearest",
) -> tuple[ImageBuffer, np.ndarray]:
    """rasterize_mesh plus the per-pixel count of triangle hits."""
    if sampling not in SAMPLING_MODES:
        raise ValueError(f"sampling must be one of {SAMPLING_MODES}, got {sampling!r}")
    buf = target.pixels.copy()
    coverage = np.zeros((target.height, target.width), dtype=np.uint32)
    kernels.rasterize_rgba(
        mesh.vertices,
        mesh.uvs,
        mesh.triangles,
        texture.pixels,
        buf,
        sampling == "bilinear",
        coverage,
    )
    return ImageBuffer(buf), coverage


def blank_canvas(width: int, height: int) -> ImageBuffer:
    return ImageBuffer(np.zeros((height, width, 4), dtype=np.uint8))


def composite_frame(
    scene: Scene,
    deformed_subject: Mesh,
    index: int = 0,
    sampling: str = "bilinear",
) -> Frame:
    """Background mesh first, deformed subject mesh on top."""
    rest = scene.subject_rest_mesh
    if not (
        np.array_equal(deformed_subject.triangles, rest.triangles)
        and np.array_equal(deformed_subject.uvs, rest.uvs)
    ):
        raise ValueError("deformed subject topology does not match the rest mesh")
    canvas = blank_canvas(scene.background.width, scene.background.height)
    base = rasterize_mesh(scene.background_mesh, scene.background, canvas, sampling)
    final = rasterize_mesh(deformed_subject, scene.subject_texture, base, sampling)
    return Frame(index, final)


def build_scene(
    image: ImageBuffer,
    subject: Mask,
    plate: ImageBuffer,
    subject_cells: tuple[int, int] = DEFAULT_SUBJECT_CELLS,
    background_cells: tuple[int, int] = DEFAULT_BACKGROUND_CELLS,
) -> Scene:
    """Assemble the two-mesh scene for a segmented image.

    The background mesh spans the full image; the subject mesh spans the
    mask's bounding box with uvs remapped into full-image texture space so
    its rest render reproduces the subject pixels exactly.
    """
    if (subject.width, subject.height) != (image.width, image.height):
        raise ValueError("subject mask dimensions do not match the image")
    if not subject.bits.any():
        raise ValueError("subject mask is empty")
    w, h = image.width, image.height

    tex = image.pixels.copy()
    tex[:, :, 3] = np.where(subject.bits, 255, 0).astype(np.uint8)

    ys, xs = np.nonzero(subject.bits)
    x0, x1 = int(xs.min()), int(xs.max()) + 1
    y0, y1 = int(ys.min()), int(ys.max()) + 1
    nx = min(subject_cells[0], x1 - x0)  # never finer than one cell per pixel
    ny = min(subject_cells[1], y1 - y0)
    subject_mesh = make_grid_mesh((x0, y0, x1 - x0, y1 - y0), nx, ny)
    subject_mesh = Mesh(
        subject_mesh.vertices,
        subject_mesh.vertices / np.array([w, h], dtype=np.float64),
        subject_mesh.triangles,
    )
    background_mesh = make_grid_mesh((0, 0, w, h), *background_cells)
    return Scene(plate, ImageBuffer(tex), background_mesh, subject_mesh)


def encode_gif(frames: list[Frame], delay_cs: int) -> bytes:
    """GIF89a bytes: infinite loop, per-frame median-cut palettes.

    Frame alpha is ignored; composites are opaque by construction.
    """
    if not frames:
        raise ValueError("need at least one frame")
    return gif.encode([f.image.pixels[:, :, :3] for f in frames], delay_cs)


def write_frame_sequence(frames: list[Frame], directory, stem: str) -> list[Path]:
    """Write frames as <stem>_0000.png, <stem>_0001.png, ... (4-digit padding)."""
    if len(frames) >= 10000 or any(f.index > 9999 or f.index < 0 for f in frames):
        raise ValueError("frame index exceeds padding (at most 9999 frames)")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for f in frames:
        p = directory / f"{stem}_{f.index:04d}.png"
        save_image(f.image, p)
        paths.append(p)
    return paths


def read_frame_sequence(paths) -> list[Frame]:
    return [Frame(i, load_image(p)) for i, p in enumerate(paths)]
