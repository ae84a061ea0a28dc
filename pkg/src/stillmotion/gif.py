"""Minimal GIF89a writer: per-frame median-cut palettes, LZW compression,
and a Netscape extension for infinite looping.

Format reference: the GIF89a specification (w3.org/Graphics/GIF).
"""

from __future__ import annotations

import struct

import numpy as np

from . import kernels

_MAX_COLORS = 256


def quantize(rgb: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Palette (P, 3) uint8 and per-pixel index field (h, w) uint8.

    Frames with at most 256 distinct colors keep them exactly; larger
    gamuts go through median-cut to 256 representatives. Deterministic.
    """
    h, w = rgb.shape[:2]
    packed = (
        rgb[:, :, 0].astype(np.uint32) << 16
        | rgb[:, :, 1].astype(np.uint32) << 8
        | rgb[:, :, 2].astype(np.uint32)
    ).ravel()
    uniq, inverse, counts = np.unique(packed, return_inverse=True, return_counts=True)
    colors = np.stack(
        [(uniq >> 16) & 0xFF, (uniq >> 8) & 0xFF, uniq & 0xFF], axis=1
    ).astype(np.uint8)
    if colors.shape[0] <= _MAX_COLORS:
        palette = colors
        color_to_idx = np.arange(colors.shape[0], dtype=np.uint8)
    else:
        palette = _median_cut(colors, counts, _MAX_COLORS)
        d = (
            colors.astype(np.int64)[:, None, :] - palette.astype(np.int64)[None, :, :]
        )
        color_to_idx = np.argmin(np.sum(d * d, axis=2), axis=1).astype(np.uint8)
    indices = color_to_idx[inverse].reshape(h, w)
    return palette, indices


def _median_cut(colors: np.ndarray, counts: np.ndarray, target: int) -> np.ndarray:
    boxes = [np.arange(colors.shape[0])]
    while len(boxes) < target:
        widest = -1
        pick = -1
        for bi, box in enumerate(boxes):
            if box.size < 2:
                continue
            ranges = colors[box].astype(int).max(axis=0) - colors[box].astype(int).min(axis=0)
            span = int(ranges.max())
            if span > widest:
                widest = span
                pick = bi
        if pick < 0:
            break
        box = boxes[pick]
        ranges = colors[box].astype(int).max(axis=0) - colors[box].astype(int).min(axis=0)
        chan = int(np.argmax(ranges))
        order = box[np.lexsort((box, colors[box, chan]))]
        cum = np.cumsum(counts[order])
        half = cum[-1] / 2.0
        split = int(np.searchsorted(cum, half, side="left")) + 1
        split = min(max(split, 1), order.size - 1)
        boxes[pick] = order[:split]
        boxes.append(order[split:])
    palette = np.empty((len(boxes), 3), dtype=np.uint8)
    for bi, box in enumerate(boxes):
        weight = counts[box].astype(np.float64)
        mean = (colors[box].astype(np.float64) * weight[:, None]).sum(axis=0) / weight.sum()
        palette[bi] = np.clip(np.rint(mean), 0, 255).astype(np.uint8)
    return palette


def _sub_blocks(data: bytes) -> bytes:
    out = bytearray()
    for i in range(0, len(data), 255):
        chunk = data[i : i + 255]
        out.append(len(chunk))
        out += chunk
    out.append(0)
    return bytes(out)


def encode(frames_rgb: list[np.ndarray], delay_cs: int) -> bytes:
    """GIF89a bytes for (h, w, 3) uint8 frames, looping forever.

    `delay_cs` is the per-frame delay in centiseconds.
    """
    if not frames_rgb:
        raise ValueError("need at least one frame")
    h, w = frames_rgb[0].shape[:2]
    for f in frames_rgb:
        if f.shape[:2] != (h, w):
            raise ValueError(
                f"mixed frame dimensions: {f.shape[1]}x{f.shape[0]} vs {w}x{h}"
            )
    if not (0 <= delay_cs <= 0xFFFF):
        raise ValueError("delay must fit in an unsigned 16-bit centisecond count")

    out = bytearray()
    out += b"GIF89a"
    out += struct.pack("<HHBBB", w, h, 0x70, 0, 0)  # no global color table
    # Netscape looping extension: loop count 0 = forever
    out += b"\x21\xff\x0bNETSCAPE2.0\x03\x01\x00\x00\x00"

    for frame in frames_rgb:
        palette, indices = quantize(frame)
        bits = max(int(np.ceil(np.log2(max(palette.shape[0], 2)))), 1)
        table_n = 1 << bits
        padded = np.zeros((table_n, 3), dtype=np.uint8)
        padded[: palette.shape[0]] = palette
        min_code_size = max(bits, 2)

        out += b"\x21\xf9"  # graphic control extension
        out += struct.pack("<BBHBB", 4, 0x04, delay_cs, 0, 0)  # disposal 1, no transparency
        out += b"\x2c"
        out += struct.pack("<HHHHB", 0, 0, w, h, 0x80 | (bits - 1))
        out += padded.tobytes()
        out += bytes([min_code_size])
        stream = kernels.lzw_encode(indices.ravel(), min_code_size)
        out += _sub_blocks(stream.tobytes())
    out += b"\x3b"
    return bytes(out)
