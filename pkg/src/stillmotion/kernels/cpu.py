"""Pure-numpy implementations of the hot kernels.

Every function here must produce output bit-identical to its twin in
``jit.py``; the accumulation order of floating-point expressions is part of
that contract (see test_backends).
"""

import numpy as np

NAME = "numpy"

_TAN22 = 0.4142135623730951  # tan(pi/8)


def min_distance_field(points, width, height):
    """Exact Euclidean distance from every pixel to the nearest point.

    points: (N, 2) int64 array of (x, y), N >= 1.
    Returns (height, width) float64. Computed as sqrt of the integer
    minimum squared distance, so results are exact.
    """
    xs = np.arange(width, dtype=np.int64)[None, :]
    ys = np.arange(height, dtype=np.int64)[:, None]
    best = np.full((height, width), np.iinfo(np.int64).max, dtype=np.int64)
    for px, py in points:
        d2 = (xs - px) ** 2 + (ys - py) ** 2
        np.minimum(best, d2, out=best)
    return np.sqrt(best.astype(np.float64))


def gauss_seidel_channel(values, hole, tol, max_iters, check_every):
    """Red-black Gauss-Seidel fill of `hole` pixels in one channel.

    values: (H, W) float64, modified in place. Pixels outside `hole` act
    as fixed boundary data; hole pixels converge toward the mean of their
    in-bounds 4-neighbors. Returns (residual, iterations).

    Red cells (x+y even) only have black neighbors and vice versa, so a
    full-array masked update per color is the sequential schedule exactly.
    """
    h, w = values.shape
    yy, xx = np.mgrid[0:h, 0:w]
    red = hole & ((xx + yy) % 2 == 0)
    black = hole & ((xx + yy) % 2 == 1)

    counts = np.zeros((h, w), dtype=np.float64)
    counts += np.pad(np.ones((h - 1, w)), ((1, 0), (0, 0)))  # has up
    counts += np.pad(np.ones((h - 1, w)), ((0, 1), (0, 0)))  # has down
    counts += np.pad(np.ones((h, w - 1)), ((0, 0), (1, 0)))  # has left
    counts += np.pad(np.ones((h, w - 1)), ((0, 0), (0, 1)))  # has right

    def neighbor_sum():
        s = np.zeros((h, w), dtype=np.float64)
        s[1:, :] += values[:-1, :]   # up
        s[:-1, :] += values[1:, :]   # down
        s[:, 1:] += values[:, :-1]   # left
        s[:, :-1] += values[:, 1:]   # right
        return s

    def residual():
        if not hole.any():
            return 0.0
        means = neighbor_sum() / counts
        return float(np.max(np.abs(values[hole] - means[hole])))

    res = residual()
    it = 0
    while it < max_iters and res > tol:
        for color in (red, black):
            means = neighbor_sum() / counts
            values[color] = means[color]
        it += 1
        if it % check_every == 0 or it == max_iters:
            res = residual()
    if it % check_every != 0 and it != 0:
        res = residual()
    return res, it


def rasterize_rgba(verts, uvs, tris, texture, target, bilinear, coverage):
    """Fill textured triangles into `target` (modified in place).

    Top-left fill rule; barycentric uv interpolation; source-over blend
    with round-half-to-even. `coverage` counts pixel-center hits.
    """
    h, w = target.shape[:2]
    th, tw = texture.shape[:2]
    tex = texture.astype(np.float64)
    for t in range(tris.shape[0]):
        i0, i1, i2 = tris[t]
        x0, y0 = verts[i0]
        x1, y1 = verts[i1]
        x2, y2 = verts[i2]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 <= 0.0:
            continue
        xmin = max(int(np.floor(min(x0, x1, x2) - 0.5)), 0)
        xmax = min(int(np.ceil(max(x0, x1, x2) - 0.5)), w - 1)
        ymin = max(int(np.floor(min(y0, y1, y2) - 0.5)), 0)
        ymax = min(int(np.ceil(max(y0, y1, y2) - 0.5)), h - 1)
        if xmin > xmax or ymin > ymax:
            continue
        px = np.arange(xmin, xmax + 1, dtype=np.float64) + 0.5
        py = np.arange(ymin, ymax + 1, dtype=np.float64) + 0.5
        pxg = px[None, :]
        pyg = py[:, None]

        # Shared edges must evaluate to exact negations in both triangles,
        # or near-edge pixel centers get drawn twice or never. Each edge is
        # computed from a canonical endpoint order, sign-flipped to match
        # this triangle's winding.
        def edge(ax, ay, bx, by):
            if (ax, ay) <= (bx, by):
                cx, cy, dx, dy, s = ax, ay, bx - ax, by - ay, 1.0
            else:
                cx, cy, dx, dy, s = bx, by, ax - bx, ay - by, -1.0
            wv = (dx * (pyg - cy) - dy * (pxg - cx)) * s
            return wv, s * dx, s * dy

        w0, d0x, d0y = edge(x1, y1, x2, y2)
        w1, d1x, d1y = edge(x2, y2, x0, y0)
        w2, d2x, d2y = edge(x0, y0, x1, y1)

        inside = _edge_ok(w0, d0x, d0y) & _edge_ok(w1, d1x, d1y) & _edge_ok(w2, d2x, d2y)
        if not inside.any():
            continue
        iy, ix = np.nonzero(inside)
        b0 = w0[iy, ix] / area2
        b1 = w1[iy, ix] / area2
        b2 = w2[iy, ix] / area2
        u = b0 * uvs[i0, 0] + b1 * uvs[i1, 0] + b2 * uvs[i2, 0]
        v = b0 * uvs[i0, 1] + b1 * uvs[i1, 1] + b2 * uvs[i2, 1]

        if bilinear:
            src = _sample_bilinear(tex, u * tw - 0.5, v * th - 0.5)
        else:
            sx = np.clip(np.floor(u * tw), 0, tw - 1).astype(np.int64)
            sy = np.clip(np.floor(v * th), 0, th - 1).astype(np.int64)
            src = tex[sy, sx]

        ty_pix = iy + ymin
        tx_pix = ix + xmin
        dst = target[ty_pix, tx_pix].astype(np.float64)
        alpha = src[:, 3] / 255.0
        out = np.empty_like(dst)
        for c in range(3):
            out[:, c] = np.rint(src[:, c] * alpha + dst[:, c] * (1.0 - alpha))
        out[:, 3] = np.rint(src[:, 3] + dst[:, 3] * (1.0 - alpha))
        target[ty_pix, tx_pix] = np.clip(out, 0.0, 255.0).astype(np.uint8)
        coverage[ty_pix, tx_pix] += 1


def _edge_ok(wv, dx, dy):
    # E == 0 counts only on top (dy == 0, dx > 0) and left (dy < 0) edges
    if dy < 0.0 or (dy == 0.0 and dx > 0.0):
        return wv >= 0.0
    return wv > 0.0


def _sample_bilinear(tex, fx, fy):
    th, tw = tex.shape[:2]
    x0 = np.floor(fx)
    y0 = np.floor(fy)
    ax = fx - x0
    ay = fy - y0
    x0i = np.clip(x0, 0, tw - 1).astype(np.int64)
    x1i = np.clip(x0 + 1, 0, tw - 1).astype(np.int64)
    y0i = np.clip(y0, 0, th - 1).astype(np.int64)
    y1i = np.clip(y0 + 1, 0, th - 1).astype(np.int64)
    w00 = ((1.0 - ax) * (1.0 - ay))[:, None]
    w10 = (ax * (1.0 - ay))[:, None]
    w01 = ((1.0 - ax) * ay)[:, None]
    w11 = (ax * ay)[:, None]
    return (
        tex[y0i, x0i] * w00
        + tex[y0i, x1i] * w10
        + tex[y1i, x0i] * w01
        + tex[y1i, x1i] * w11
    )


def nms_mask(mag, gx, gy):
    """Non-maximum suppression of gradient magnitude.

    Keeps pixels that beat the neighbor against the gradient direction
    strictly and the neighbor along it non-strictly (ties collapse to the
    earlier raster neighbor). Out-of-bounds neighbors count as 0.
    """
    h, w = mag.shape
    pad = np.zeros((h + 2, w + 2), dtype=np.float64)
    pad[1:-1, 1:-1] = mag

    def nb(dy, dx):
        return pad[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]

    ax = np.abs(gx)
    ay = np.abs(gy)
    horiz = ay <= ax * _TAN22
    vert = ~horiz & (ax <= ay * _TAN22)
    diag_main = ~horiz & ~vert & (gx * gy > 0.0)
    diag_anti = ~horiz & ~vert & ~diag_main

    keep = np.zeros((h, w), dtype=np.bool_)
    keep |= horiz & (mag > nb(0, -1)) & (mag >= nb(0, 1))
    keep |= vert & (mag > nb(-1, 0)) & (mag >= nb(1, 0))
    keep |= diag_main & (mag > nb(-1, -1)) & (mag >= nb(1, 1))
    keep |= diag_anti & (mag > nb(-1, 1)) & (mag >= nb(1, -1))
    keep &= mag > 0.0
    return keep


def hysteresis(strong, weak):
    """Pixels of `weak` reachable (8-connected) from any `strong` pixel."""
    reach = strong & weak
    allowed = weak
    while True:
        grown = reach.copy()
        grown[1:, :] |= reach[:-1, :]
        grown[:-1, :] |= reach[1:, :]
        grown[:, 1:] |= reach[:, :-1]
        grown[:, :-1] |= reach[:, 1:]
        grown[1:, 1:] |= reach[:-1, :-1]
        grown[1:, :-1] |= reach[:-1, 1:]
        grown[:-1, 1:] |= reach[1:, :-1]
        grown[:-1, :-1] |= reach[1:, 1:]
        grown &= allowed
        if (grown == reach).all():
            return reach
        reach = grown


def label4(mask):
    """4-connected labeling. Labels are dense from 1 in raster order of
    each component's first pixel; background is 0.
    """
    h, w = mask.shape
    big = np.int64(h * w)
    idx = np.where(mask, np.arange(h * w, dtype=np.int64).reshape(h, w), big)
    while True:
        nxt = idx.copy()
        np.minimum(nxt[1:, :], idx[:-1, :], out=nxt[1:, :])
        np.minimum(nxt[:-1, :], idx[1:, :], out=nxt[:-1, :])
        np.minimum(nxt[:, 1:], idx[:, :-1], out=nxt[:, 1:])
        np.minimum(nxt[:, :-1], idx[:, 1:], out=nxt[:, :-1])
        nxt[~mask] = big
        if (nxt == idx).all():
            break
        idx = nxt
    labels = np.zeros((h, w), dtype=np.int32)
    roots = idx[mask]
    if roots.size == 0:
        return labels, 0
    uniq = np.unique(roots)  # ascending root index == first-encounter order
    remap = {int(r): i + 1 for i, r in enumerate(uniq)}
    flat = labels.reshape(-1)
    src = idx.reshape(-1)
    for r, lab in remap.items():
        flat[src == r] = lab
    return labels, len(uniq)


def lzw_encode(indices, min_code_size):
    """GIF-flavor LZW over palette indices, LSB-first bit packing.

    Returns the packed code stream as a uint8 array (no sub-block framing).
    """
    clear = 1 << min_code_size
    end = clear + 1
    out = bytearray()
    acc = 0
    nbits = 0

    def emit(code, length):
        nonlocal acc, nbits
        acc |= code << nbits
        nbits += length
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8

    table = {}
    code_len = min_code_size + 1
    next_code = end + 1
    emit(clear, code_len)
    data = indices
    n = data.shape[0]
    if n > 0:
        wcode = int(data[0])
        for i in range(1, n):
            k = int(data[i])
            key = (wcode << 8) | k
            hit = table.get(key, -1)
            if hit >= 0:
                wcode = hit
                continue
            emit(wcode, code_len)
            table[key] = next_code
            if next_code == (1 << code_len) and code_len < 12:
                code_len += 1
            next_code += 1
            if next_code == 4096:
                emit(clear, code_len)
                table.clear()
                code_len = min_code_size + 1
                next_code = end + 1
            wcode = k
        emit(wcode, code_len)
    emit(end, code_len)
    if nbits > 0:
        out.append(acc & 0xFF)
    return np.frombuffer(bytes(out), dtype=np.uint8)


def assign_labels(features, centers):
    """Index of the nearest center per feature row (first-min tie-break)."""
    d = features[:, None, :] - centers[None, :, :]
    return np.argmin(np.sum(d * d, axis=2), axis=1).astype(np.int64)
