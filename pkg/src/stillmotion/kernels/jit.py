"""Numba-compiled twins of the kernels in ``cpu.py``.

Accumulation orders mirror the numpy expressions exactly so both backends
return bit-identical results.
"""

import numpy as np
from numba import njit, types
from numba.typed import Dict

NAME = "numba"

_TAN22 = 0.4142135623730951
_INF = 1e18


@njit(cache=True)
def _dt1d(f, n, d, v, z):
    # Felzenszwalb-Huttenlocher 1D squared distance transform
    k = 0
    v[0] = 0
    z[0] = -_INF
    z[1] = _INF
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2 * q - 2 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = _INF
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) * (q - v[k]) + f[v[k]]


@njit(cache=True)
def min_distance_field(points, width, height):
    f = np.full((height, width), _INF)
    for i in range(points.shape[0]):
        f[points[i, 1], points[i, 0]] = 0.0
    tmp = np.empty((height, width))
    d = np.empty(max(width, height))
    v = np.empty(max(width, height), dtype=np.int64)
    z = np.empty(max(width, height) + 1)
    col = np.empty(height)
    for x in range(width):
        for y in range(height):
            col[y] = f[y, x]
        _dt1d(col, height, d, v, z)
        for y in range(height):
            tmp[y, x] = d[y]
    out = np.empty((height, width))
    row = np.empty(width)
    for y in range(height):
        for x in range(width):
            row[x] = tmp[y, x]
        _dt1d(row, width, d, v, z)
        for x in range(width):
            out[y, x] = np.sqrt(d[x])
    return out


@njit(cache=True)
def _neighbor_mean(values, y, x, h, w):
    s = 0.0
    c = 0.0
    if y > 0:
        s += values[y - 1, x]
        c += 1.0
    if y < h - 1:
        s += values[y + 1, x]
        c += 1.0
    if x > 0:
        s += values[y, x - 1]
        c += 1.0
    if x < w - 1:
        s += values[y, x + 1]
        c += 1.0
    return s / c


@njit(cache=True)
def gauss_seidel_channel(values, hole, tol, max_iters, check_every):
    h, w = values.shape

    res = 0.0
    for y in range(h):
        for x in range(w):
            if hole[y, x]:
                r = abs(values[y, x] - _neighbor_mean(values, y, x, h, w))
                if r > res:
                    res = r
    it = 0
    while it < max_iters and res > tol:
        for parity in range(2):
            for y in range(h):
                for x in range(w):
                    if hole[y, x] and (x + y) % 2 == parity:
                        values[y, x] = _neighbor_mean(values, y, x, h, w)
        it += 1
        if it % check_every == 0 or it == max_iters:
            res = 0.0
            for y in range(h):
                for x in range(w):
                    if hole[y, x]:
                        r = abs(values[y, x] - _neighbor_mean(values, y, x, h, w))
                        if r > res:
                            res = r
    if it % check_every != 0 and it != 0:
        res = 0.0
        for y in range(h):
            for x in range(w):
                if hole[y, x]:
                    r = abs(values[y, x] - _neighbor_mean(values, y, x, h, w))
                    if r > res:
                        res = r
    return res, it


@njit(cache=True)
def _edge_accepts(wv, dx, dy):
    if dy < 0.0 or (dy == 0.0 and dx > 0.0):
        return wv >= 0.0
    return wv > 0.0


@njit(cache=True)
def _canon_edge(ax, ay, bx, by):
    if ax < bx or (ax == bx and ay <= by):
        return ax, ay, bx - ax, by - ay, 1.0
    return bx, by, ax - bx, ay - by, -1.0


@njit(cache=True)
def rasterize_rgba(verts, uvs, tris, texture, target, bilinear, coverage):
    h, w = target.shape[:2]
    th, tw = texture.shape[:2]
    for t in range(tris.shape[0]):
        i0 = tris[t, 0]
        i1 = tris[t, 1]
        i2 = tris[t, 2]
        x0 = verts[i0, 0]
        y0 = verts[i0, 1]
        x1 = verts[i1, 0]
        y1 = verts[i1, 1]
        x2 = verts[i2, 0]
        y2 = verts[i2, 1]
        area2 = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area2 <= 0.0:
            continue
        xmin = max(int(np.floor(min(x0, min(x1, x2)) - 0.5)), 0)
        xmax = min(int(np.ceil(max(x0, max(x1, x2)) - 0.5)), w - 1)
        ymin = max(int(np.floor(min(y0, min(y1, y2)) - 0.5)), 0)
        ymax = min(int(np.ceil(max(y0, max(y1, y2)) - 0.5)), h - 1)
        if xmin > xmax or ymin > ymax:
            continue
        # canonical edge setup, mirroring cpu.rasterize_rgba exactly
        c0x, c0y, d0x, d0y, s0 = _canon_edge(x1, y1, x2, y2)
        c1x, c1y, d1x, d1y, s1 = _canon_edge(x2, y2, x0, y0)
        c2x, c2y, d2x, d2y, s2 = _canon_edge(x0, y0, x1, y1)
        for py_i in range(ymin, ymax + 1):
            py = py_i + 0.5
            for px_i in range(xmin, xmax + 1):
                px = px_i + 0.5
                w0 = (d0x * (py - c0y) - d0y * (px - c0x)) * s0
                if not _edge_accepts(w0, s0 * d0x, s0 * d0y):
                    continue
                w1 = (d1x * (py - c1y) - d1y * (px - c1x)) * s1
                if not _edge_accepts(w1, s1 * d1x, s1 * d1y):
                    continue
                w2 = (d2x * (py - c2y) - d2y * (px - c2x)) * s2
                if not _edge_accepts(w2, s2 * d2x, s2 * d2y):
                    continue
                b0 = w0 / area2
                b1 = w1 / area2
                b2 = w2 / area2
                u = b0 * uvs[i0, 0] + b1 * uvs[i1, 0] + b2 * uvs[i2, 0]
                v = b0 * uvs[i0, 1] + b1 * uvs[i1, 1] + b2 * uvs[i2, 1]
                if bilinear:
                    fx = u * tw - 0.5
                    fy = v * th - 0.5
                    xf = np.floor(fx)
                    yf = np.floor(fy)
                    ax = fx - xf
                    ay = fy - yf
                    x0i = min(max(int(xf), 0), tw - 1)
                    x1i = min(max(int(xf) + 1, 0), tw - 1)
                    y0i = min(max(int(yf), 0), th - 1)
                    y1i = min(max(int(yf) + 1, 0), th - 1)
                    w00 = (1.0 - ax) * (1.0 - ay)
                    w10 = ax * (1.0 - ay)
                    w01 = (1.0 - ax) * ay
                    w11 = ax * ay
                    sr = (
                        texture[y0i, x0i, 0] * w00
                        + texture[y0i, x1i, 0] * w10
                        + texture[y1i, x0i, 0] * w01
                        + texture[y1i, x1i, 0] * w11
                    )
                    sg = (
                        texture[y0i, x0i, 1] * w00
                        + texture[y0i, x1i, 1] * w10
                        + texture[y1i, x0i, 1] * w01
                        + texture[y1i, x1i, 1] * w11
                    )
                    sb = (
                        texture[y0i, x0i, 2] * w00
                        + texture[y0i, x1i, 2] * w10
                        + texture[y1i, x0i, 2] * w01
                        + texture[y1i, x1i, 2] * w11
                    )
                    sa = (
                        texture[y0i, x0i, 3] * w00
                        + texture[y0i, x1i, 3] * w10
                        + texture[y1i, x0i, 3] * w01
                        + texture[y1i, x1i, 3] * w11
                    )
                else:
                    sx = min(max(int(np.floor(u * tw)), 0), tw - 1)
                    sy = min(max(int(np.floor(v * th)), 0), th - 1)
                    sr = float(texture[sy, sx, 0])
                    sg = float(texture[sy, sx, 1])
                    sb = float(texture[sy, sx, 2])
                    sa = float(texture[sy, sx, 3])
                alpha = sa / 255.0
                inv = 1.0 - alpha
                orr = np.rint(sr * alpha + target[py_i, px_i, 0] * inv)
                og = np.rint(sg * alpha + target[py_i, px_i, 1] * inv)
                ob = np.rint(sb * alpha + target[py_i, px_i, 2] * inv)
                oa = np.rint(sa + target[py_i, px_i, 3] * inv)
                target[py_i, px_i, 0] = np.uint8(min(max(orr, 0.0), 255.0))
                target[py_i, px_i, 1] = np.uint8(min(max(og, 0.0), 255.0))
                target[py_i, px_i, 2] = np.uint8(min(max(ob, 0.0), 255.0))
                target[py_i, px_i, 3] = np.uint8(min(max(oa, 0.0), 255.0))
                coverage[py_i, px_i] += 1


@njit(cache=True)
def nms_mask(mag, gx, gy):
    h, w = mag.shape
    keep = np.zeros((h, w), dtype=np.bool_)
    for y in range(h):
        for x in range(w):
            m = mag[y, x]
            if m <= 0.0:
                continue
            ax = abs(gx[y, x])
            ay = abs(gy[y, x])
            if ay <= ax * _TAN22:
                ny0, nx0, ny1, nx1 = y, x - 1, y, x + 1
            elif ax <= ay * _TAN22:
                ny0, nx0, ny1, nx1 = y - 1, x, y + 1, x
            elif gx[y, x] * gy[y, x] > 0.0:
                ny0, nx0, ny1, nx1 = y - 1, x - 1, y + 1, x + 1
            else:
                ny0, nx0, ny1, nx1 = y - 1, x + 1, y + 1, x - 1
            prev = 0.0
            if 0 <= ny0 < h and 0 <= nx0 < w:
                prev = mag[ny0, nx0]
            nxt = 0.0
            if 0 <= ny1 < h and 0 <= nx1 < w:
                nxt = mag[ny1, nx1]
            if m > prev and m >= nxt:
                keep[y, x] = True
    return keep


@njit(cache=True)
def hysteresis(strong, weak):
    h, w = strong.shape
    reach = np.zeros((h, w), dtype=np.bool_)
    stack_y = np.empty(h * w, dtype=np.int64)
    stack_x = np.empty(h * w, dtype=np.int64)
    top = 0
    for y in range(h):
        for x in range(w):
            if strong[y, x] and weak[y, x] and not reach[y, x]:
                reach[y, x] = True
                stack_y[top] = y
                stack_x[top] = x
                top += 1
                while top > 0:
                    top -= 1
                    cy = stack_y[top]
                    cx = stack_x[top]
                    for dy in range(-1, 2):
                        for dx in range(-1, 2):
                            ny = cy + dy
                            nx = cx + dx
                            if 0 <= ny < h and 0 <= nx < w:
                                if weak[ny, nx] and not reach[ny, nx]:
                                    reach[ny, nx] = True
                                    stack_y[top] = ny
                                    stack_x[top] = nx
                                    top += 1
    return reach


@njit(cache=True)
def label4(mask):
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    stack_y = np.empty(h * w, dtype=np.int64)
    stack_x = np.empty(h * w, dtype=np.int64)
    count = 0
    for y in range(h):
        for x in range(w):
            if mask[y, x] and labels[y, x] == 0:
                count += 1
                labels[y, x] = count
                stack_y[0] = y
                stack_x[0] = x
                top = 1
                while top > 0:
                    top -= 1
                    cy = stack_y[top]
                    cx = stack_x[top]
                    if cy > 0 and mask[cy - 1, cx] and labels[cy - 1, cx] == 0:
                        labels[cy - 1, cx] = count
                        stack_y[top] = cy - 1
                        stack_x[top] = cx
                        top += 1
                    if cy < h - 1 and mask[cy + 1, cx] and labels[cy + 1, cx] == 0:
                        labels[cy + 1, cx] = count
                        stack_y[top] = cy + 1
                        stack_x[top] = cx
                        top += 1
                    if cx > 0 and mask[cy, cx - 1] and labels[cy, cx - 1] == 0:
                        labels[cy, cx - 1] = count
                        stack_y[top] = cy
                        stack_x[top] = cx - 1
                        top += 1
                    if cx < w - 1 and mask[cy, cx + 1] and labels[cy, cx + 1] == 0:
                        labels[cy, cx + 1] = count
                        stack_y[top] = cy
                        stack_x[top] = cx + 1
                        top += 1
    return labels, count


@njit(cache=True)
def lzw_encode(indices, min_code_size):
    clear = 1 << min_code_size
    end = clear + 1
    n = indices.shape[0]
    out = np.empty(2 * n + 64, dtype=np.uint8)
    pos = 0
    acc = 0
    nbits = 0

    table = Dict.empty(types.int64, types.int64)
    code_len = min_code_size + 1
    next_code = end + 1

    # emit clear
    acc |= clear << nbits
    nbits += code_len
    while nbits >= 8:
        out[pos] = acc & 0xFF
        pos += 1
        acc >>= 8
        nbits -= 8

    if n > 0:
        wcode = np.int64(indices[0])
        for i in range(1, n):
            k = np.int64(indices[i])
            key = (wcode << 8) | k
            if key in table:
                wcode = table[key]
                continue
            acc |= wcode << nbits
            nbits += code_len
            while nbits >= 8:
                out[pos] = acc & 0xFF
                pos += 1
                acc >>= 8
                nbits -= 8
            table[key] = next_code
            if next_code == (1 << code_len) and code_len < 12:
                code_len += 1
            next_code += 1
            if next_code == 4096:
                acc |= clear << nbits
                nbits += code_len
                while nbits >= 8:
                    out[pos] = acc & 0xFF
                    pos += 1
                    acc >>= 8
                    nbits -= 8
                table = Dict.empty(types.int64, types.int64)
                code_len = min_code_size + 1
                next_code = end + 1
            wcode = k
        acc |= wcode << nbits
        nbits += code_len
        while nbits >= 8:
            out[pos] = acc & 0xFF
            pos += 1
            acc >>= 8
            nbits -= 8
    acc |= end << nbits
    nbits += code_len
    while nbits >= 8:
        out[pos] = acc & 0xFF
        pos += 1
        acc >>= 8
        nbits -= 8
    if nbits > 0:
        out[pos] = acc & 0xFF
        pos += 1
    return out[:pos].copy()


@njit(cache=True)
def assign_labels(features, centers):
    n, nf = features.shape
    k = centers.shape[0]
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        best = -1
        best_d = _INF
        for j in range(k):
            acc = 0.0
            for f in range(nf):
                diff = features[i, f] - centers[j, f]
                acc += diff * diff
            if acc < best_d:
                best_d = acc
                best = j
        labels[i] = best
    return labels
