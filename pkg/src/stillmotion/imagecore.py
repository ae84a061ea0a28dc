"""Raster primitives: pixel containers, PNG/PPM I/O, distance transform,
edge detectors, morphology and connected components.

All functions treat their inputs as immutable and return fresh values.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import kernels
from .errors import EmptyImageError, ImageDecodeError

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_SOBEL_Y = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)


@dataclass(frozen=True)
class ImageBuffer:
    """W x H raster of row-major RGBA samples, 8 bits per channel."""

    pixels: np.ndarray  # (height, width, 4) uint8

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=np.uint8)
        if p.ndim != 3 or p.shape[2] != 4:
            raise ValueError(f"expected (h, w, 4) pixel array, got shape {p.shape}")
        if p.shape[0] < 1 or p.shape[1] < 1:
            raise ValueError("image dimensions must be at least 1x1")
        object.__setattr__(self, "pixels", p)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def copy(self) -> "ImageBuffer":
        return ImageBuffer(self.pixels.copy())


@dataclass(frozen=True)
class Mask:
    """Binary field marking a pixel subset of a companion image."""

    bits: np.ndarray  # (height, width) bool

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=bool)
        if b.ndim != 2:
            raise ValueError(f"expected 2-d mask, got shape {b.shape}")
        object.__setattr__(self, "bits", b)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    def area(self) -> int:
        return int(np.count_nonzero(self.bits))


@dataclass(frozen=True)
class ScalarField:
    """Per-pixel non-negative real values (e.g. click distances)."""

    values: np.ndarray  # (height, width) float64

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ValueError(f"expected 2-d field, got shape {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("field values must be finite")
        if (v < 0).any():
            raise ValueError("field values must be non-negative")
        object.__setattr__(self, "values", v)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class ClickSet:
    """Ordered positive and negative click coordinates."""

    positives: tuple = field(default=())
    negatives: tuple = field(default=())

    def __post_init__(self):
        pos = tuple((int(x), int(y)) for x, y in self.positives)
        neg = tuple((int(x), int(y)) for x, y in self.negatives)
        overlap = set(pos) & set(neg)
        if overlap:
            raise ValueError(f"clicks marked both positive and negative: {sorted(overlap)}")
        object.__setattr__(self, "positives", pos)
        object.__setattr__(self, "negatives", neg)

    def validate_bounds(self, width: int, height: int) -> None:
        for x, y in self.positives + self.negatives:
            if not (0 <= x < width and 0 <= y < height):
                raise ValueError(f"click ({x}, {y}) outside {width}x{height} image")

    def to_json_obj(self) -> dict:
        return {
            "positives": [[x, y] for x, y in self.positives],
            "negatives": [[x, y] for x, y in self.negatives],
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ClickSet":
        if not isinstance(obj, dict):
            raise ValueError("click document must be a JSON object")
        pos = obj.get("positives", [])
        neg = obj.get("negatives", [])
        for name, lst in (("positives", pos), ("negatives", neg)):
            if not isinstance(lst, list) or any(
                not isinstance(c, (list, tuple)) or len(c) != 2 for c in lst
            ):
                raise ValueError(f"'{name}' must be a list of [x, y] pairs")
        return cls(tuple(map(tuple, pos)), tuple(map(tuple, neg)))


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def load_image(path) -> ImageBuffer:
    """Decode a PNG or binary PPM (P6) file into an RGBA buffer.

    Grayscale and RGB inputs are promoted to RGBA with alpha 255.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such image file: {path}")
    data = path.read_bytes()
    return decode_image(data, name=str(path))


def decode_image(data: bytes, name: str = "<bytes>") -> ImageBuffer:
    """Decode raw PNG/PPM bytes. Raises ImageDecodeError on bad input."""
    if data[:2] == b"P6":
        return ImageBuffer(_decode_ppm(data, name))
    try:
        with Image.open(io.BytesIO(data)) as im:
            im.load()
            if im.width < 1 or im.height < 1:
                raise EmptyImageError(f"{name}: image has a zero dimension")
            rgba = im.convert("RGBA")
            arr = np.asarray(rgba, dtype=np.uint8)
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageDecodeError(f"{name}: cannot decode image data ({exc})") from exc
    return ImageBuffer(arr)


def _decode_ppm(data: bytes, name: str) -> np.ndarray:
    try:
        fields = []
        pos = 2
        while len(fields) < 3:
            while pos < len(data) and data[pos : pos + 1].isspace():
                pos += 1
            if data[pos : pos + 1] == b"#":
                while pos < len(data) and data[pos] != 0x0A:
                    pos += 1
                continue
            start = pos
            while pos < len(data) and not data[pos : pos + 1].isspace():
                pos += 1
            fields.append(int(data[start:pos]))
        pos += 1  # single whitespace after maxval
        width, height, maxval = fields
        if maxval != 255:
            raise ValueError(f"unsupported maxval {maxval}")
        if width < 1 or height < 1:
            raise EmptyImageError(f"{name}: image has a zero dimension")
        raw = data[pos : pos + width * height * 3]
        if len(raw) != width * height * 3:
            raise ValueError("truncated pixel data")
        rgb = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
        out = np.empty((height, width, 4), dtype=np.uint8)
        out[:, :, :3] = rgb
        out[:, :, 3] = 255
        return out
    except EmptyImageError:
        raise
    except Exception as exc:
        raise ImageDecodeError(f"{name}: cannot decode PPM data ({exc})") from exc


def save_image(image: ImageBuffer, path) -> None:
    """Write `image` as PNG (default) or binary PPM, chosen by extension.

    PNG writes are 8-bit RGBA, non-interlaced, and round-trip bit-exactly
    through load_image. PPM drops the alpha channel.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.suffix.lower() == ".ppm":
        header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
        path.write_bytes(header + image.pixels[:, :, :3].tobytes())
        return
    Image.fromarray(image.pixels, mode="RGBA").save(path, format="PNG")


def encode_png(image: ImageBuffer) -> bytes:
    """PNG bytes for `image` (8-bit RGBA, non-interlaced)."""
    buf = io.BytesIO()
    Image.fromarray(image.pixels, mode="RGBA").save(buf, format="PNG")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Distance transform
# ---------------------------------------------------------------------------

def distance_transform(clicks, width: int, height: int) -> ScalarField:
    """Euclidean distance from every pixel to the nearest click.

    An empty click list yields the sentinel field, all values width+height
    (strictly larger than any achievable in-image distance).
    """
    pts = [(int(x), int(y)) for x, y in clicks]
    for x, y in pts:
        if not (0 <= x < width and 0 <= y < height):
            raise ValueError(f"click ({x}, {y}) outside {width}x{height} image")
    if not pts:
        return ScalarField(np.full((height, width), float(width + height)))
    arr = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    return ScalarField(kernels.min_distance_field(arr, width, height))


# ---------------------------------------------------------------------------
# Edge detectors
# ---------------------------------------------------------------------------

def luma(image: ImageBuffer) -> np.ndarray:
    """Rec.601 luma of the color channels as float64."""
    p = image.pixels.astype(np.float64)
    r, g, b = LUMA_WEIGHTS
    return p[:, :, 0] * r + p[:, :, 1] * g + p[:, :, 2] * b


def _correlate3(channel: np.ndarray, kern: np.ndarray) -> np.ndarray:
    padded = np.pad(channel, 1, mode="edge")
    h, w = channel.shape
    out = np.zeros((h, w), dtype=np.float64)
    for ky in range(3):
        for kx in range(3):
            if kern[ky, kx] != 0.0:
                out += kern[ky, kx] * padded[ky : ky + h, kx : kx + w]
    return out


def sobel_xy(image: ImageBuffer) -> tuple[np.ndarray, np.ndarray]:
    """Raw Sobel responses (Gx, Gy) of the luma, replicate borders."""
    if image.width < 3 or image.height < 3:
        raise ValueError("sobel needs an image of at least 3x3")
    lum = luma(image)
    return _correlate3(lum, _SOBEL_X), _correlate3(lum, _SOBEL_Y)


def sobel_gradient(image: ImageBuffer) -> ScalarField:
    """Sobel gradient magnitude sqrt(Gx^2 + Gy^2) of the luma."""
    gx, gy = sobel_xy(image)
    return ScalarField(np.hypot(gx, gy))


def gaussian_blur(channel: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with replicate borders.

    Taps accumulate as symmetric pairs so mirror-symmetric inputs blur to
    exactly mirror-symmetric outputs (keeps edge thinning unambiguous on
    symmetric fixtures).
    """
    radius = max(int(np.ceil(3.0 * sigma)), 1)
    xs = np.arange(0, radius + 1, dtype=np.float64)
    half = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    norm = half[0] + 2.0 * half[1:].sum()
    half /= norm
    h, w = channel.shape
    padded = np.pad(channel, ((0, 0), (radius, radius)), mode="edge")
    tmp = half[0] * padded[:, radius : radius + w]
    for i in range(1, radius + 1):
        tmp += half[i] * (
            padded[:, radius - i : radius - i + w] + padded[:, radius + i : radius + i + w]
        )
    padded = np.pad(tmp, ((radius, radius), (0, 0)), mode="edge")
    out = half[0] * padded[radius : radius + h, :]
    for i in range(1, radius + 1):
        out += half[i] * (
            padded[radius - i : radius - i + h, :] + padded[radius + i : radius + i + h, :]
        )
    return out


def canny_edges(image: ImageBuffer, low: float, high: float, sigma: float = 1.4) -> Mask:
    """Classic four-stage edge detection: Gaussian smoothing, Sobel
    gradient, non-maximum suppression, double-threshold hysteresis.
    """
    if not (0 <= low <= high):
        raise ValueError(f"thresholds must satisfy 0 <= low <= high, got {low}, {high}")
    if image.width < 3 or image.height < 3:
        raise ValueError("canny needs an image of at least 3x3")
    smoothed = gaussian_blur(luma(image), sigma)
    gx = _correlate3(smoothed, _SOBEL_X)
    gy = _correlate3(smoothed, _SOBEL_Y)
    mag = np.hypot(gx, gy)
    thin = kernels.nms_mask(mag, gx, gy)
    strong = thin & (mag >= high)
    weak = thin & (mag >= low)
    return Mask(kernels.hysteresis(strong, weak))


# ---------------------------------------------------------------------------
# Morphology and components
# ---------------------------------------------------------------------------

def _disc_offsets(radius: float):
    r = int(np.floor(radius))
    offs = []
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx * dx + dy * dy <= radius * radius:
                offs.append((dy, dx))
    return offs


def dilate(mask: Mask, radius: float) -> Mask:
    """Morphological dilation with a disc element; radius 0 is identity."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    bits = mask.bits
    out = np.zeros_like(bits)
    h, w = bits.shape
    for dy, dx in _disc_offsets(radius):
        ys = slice(max(dy, 0), min(h + dy, h))
        yt = slice(max(-dy, 0), min(h - dy, h))
        xs = slice(max(dx, 0), min(w + dx, w))
        xt = slice(max(-dx, 0), min(w - dx, w))
        out[ys, xs] |= bits[yt, xt]
    return Mask(out)


def erode(mask: Mask, radius: float) -> Mask:
    """Morphological erosion, defined as the complement-dual of dilate
    (pixels outside the image count as set).
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return Mask(~dilate(Mask(~mask.bits), radius).bits)


def closing(mask: Mask, radius: float) -> Mask:
    return erode(dilate(mask, radius), radius)


def connected_components(mask: Mask) -> tuple[np.ndarray, int]:
    """4-connected labeling: background 0, labels dense from 1 in raster
    order of each component's first pixel.
    """
    labels, count = kernels.label4(mask.bits)
    return labels, int(count)
