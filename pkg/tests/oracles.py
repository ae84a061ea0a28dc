"""Independent reference implementations used to derive and check expected
values. Everything here is deliberately naive (plain loops, dense algebra,
direct definitions) and shares no code with the package.
"""

import zlib

import numpy as np


def brute_distance_field(clicks, width, height):
    """Min-over-clicks Euclidean distance, plain loops."""
    out = np.empty((height, width), dtype=np.float64)
    for y in range(height):
        for x in range(width):
            out[y, x] = min(
                np.sqrt((x - cx) ** 2 + (y - cy) ** 2) for cx, cy in clicks
            )
    return out


def flood_fill_labels(mask):
    """4-connected components by explicit BFS flood fill."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    nxt = 0
    for sy in range(h):
        for sx in range(w):
            if mask[sy, sx] and labels[sy, sx] == 0:
                nxt += 1
                queue = [(sy, sx)]
                labels[sy, sx] = nxt
                while queue:
                    y, x = queue.pop(0)
                    for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                        ny, nx_ = y + dy, x + dx
                        if 0 <= ny < h and 0 <= nx_ < w and mask[ny, nx_] and labels[ny, nx_] == 0:
                            labels[ny, nx_] = nxt
                            queue.append((ny, nx_))
    return labels, nxt


def same_partition(a, b):
    """True if two label fields induce the same pixel partition."""
    if a.shape != b.shape:
        return False
    fg_a, fg_b = a > 0, b > 0
    if not np.array_equal(fg_a, fg_b):
        return False
    mapping = {}
    seen = set()
    for la, lb in zip(a[fg_a].ravel(), b[fg_b].ravel()):
        if la in mapping:
            if mapping[la] != lb:
                return False
        else:
            if lb in seen:
                return False
            mapping[la] = lb
            seen.add(lb)
    return True


def dense_laplace_solve(channel, hole):
    """Direct dense solve of the hole's Laplace system, one channel.

    Each hole pixel equals the mean of its in-bounds 4-neighbors; non-hole
    neighbors act as Dirichlet data.
    """
    h, w = channel.shape
    idx = {-1: -1}
    hole_pixels = [(y, x) for y in range(h) for x in range(w) if hole[y, x]]
    for i, p in enumerate(hole_pixels):
        idx[p] = i
    n = len(hole_pixels)
    A = np.zeros((n, n))
    b = np.zeros(n)
    for i, (y, x) in enumerate(hole_pixels):
        nbs = [
            (y + dy, x + dx)
            for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1))
            if 0 <= y + dy < h and 0 <= x + dx < w
        ]
        A[i, i] = len(nbs)
        for ny, nx_ in nbs:
            if hole[ny, nx_]:
                A[i, idx[(ny, nx_)]] -= 1.0
            else:
                b[i] += channel[ny, nx_]
    sol = np.linalg.solve(A, b)
    out = channel.astype(np.float64).copy()
    for i, (y, x) in enumerate(hole_pixels):
        out[y, x] = sol[i]
    return out


def decode_png(data):
    """Tiny independent PNG reader: 8-bit RGB/RGBA, non-interlaced.

    Enough of the format to cross-check the production writer.
    """
    assert data[:8] == b"\x89PNG\r\n\x1a\n", "not a PNG"
    pos = 8
    idat = b""
    width = height = None
    color_type = bit_depth = None
    while pos < len(data):
        length = int.from_bytes(data[pos : pos + 4], "big")
        ctype = data[pos + 4 : pos + 8]
        chunk = data[pos + 8 : pos + 8 + length]
        pos += 12 + length
        if ctype == b"IHDR":
            width = int.from_bytes(chunk[0:4], "big")
            height = int.from_bytes(chunk[4:8], "big")
            bit_depth = chunk[8]
            color_type = chunk[9]
            assert chunk[12] == 0, "interlaced PNG not supported"
        elif ctype == b"IDAT":
            idat += chunk
        elif ctype == b"IEND":
            break
    assert bit_depth == 8
    channels = {0: 1, 2: 3, 4: 2, 6: 4}[color_type]
    raw = zlib.decompress(idat)
    stride = width * channels
    out = np.zeros((height, stride), dtype=np.uint8)
    prev = np.zeros(stride, dtype=np.uint8)
    pos = 0
    for y in range(height):
        filt = raw[pos]
        line = np.frombuffer(raw[pos + 1 : pos + 1 + stride], dtype=np.uint8).astype(np.int32)
        pos += 1 + stride
        recon = np.zeros(stride, dtype=np.int32)
        for i in range(stride):
            a = recon[i - channels] if i >= channels else 0
            bb = int(prev[i])
            c = int(prev[i - channels]) if i >= channels else 0
            if filt == 0:
                val = line[i]
            elif filt == 1:
                val = line[i] + a
            elif filt == 2:
                val = line[i] + bb
            elif filt == 3:
                val = line[i] + (a + bb) // 2
            elif filt == 4:
                p = a + bb - c
                pa, pb, pc = abs(p - a), abs(p - bb), abs(p - c)
                if pa <= pb and pa <= pc:
                    val = line[i] + a
                elif pb <= pc:
                    val = line[i] + bb
                else:
                    val = line[i] + c
            else:
                raise AssertionError(f"unknown filter {filt}")
            recon[i] = val & 0xFF
        out[y] = recon.astype(np.uint8)
        prev = out[y].astype(np.uint8)
    return out.reshape(height, width, channels)


def best_two_partition_wcss(features):
    """Brute-force optimal 2-cluster partition by within-cluster sum of
    squares; returns (best_assignment, best_wcss).
    """
    n = features.shape[0]
    best = None
    best_obj = np.inf
    for bits in range(1, 2 ** (n - 1)):  # fix point 0 in cluster 0
        labels = np.array([(bits >> i) & 1 for i in range(n)])
        obj = 0.0
        for c in (0, 1):
            member = features[labels == c]
            if member.size == 0:
                continue
            center = member.mean(axis=0)
            obj += float(((member - center) ** 2).sum())
        if obj < best_obj:
            best_obj = obj
            best = labels
    return best, best_obj


def wcss(features, labels):
    obj = 0.0
    for c in np.unique(labels):
        member = features[labels == c]
        center = member.mean(axis=0)
        obj += float(((member - center) ** 2).sum())
    return obj


def reference_canny(luma, low, high, sigma):
    """Plain-loop four-stage edge detection used to derive fixture values.

    Stages: Gaussian blur (replicate border), 3x3 Sobel, direction-quantized
    non-maximum suppression with ties kept on the earlier raster neighbor,
    8-connected hysteresis from strong pixels.
    """
    h, w = luma.shape
    radius = max(int(np.ceil(3.0 * sigma)), 1)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k1 = np.exp(-(xs**2) / (2 * sigma * sigma))
    k1 /= k1.sum()
    kern = np.outer(k1, k1)

    def at(img, y, x):
        return img[min(max(y, 0), h - 1), min(max(x, 0), w - 1)]

    blur = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-radius, radius + 1):
                for dx in range(-radius, radius + 1):
                    acc += kern[dy + radius, dx + radius] * at(luma, y + dy, x + dx)
            blur[y, x] = acc

    sx = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
    sy = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            ax = ay = 0.0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    v = at(blur, y + dy, x + dx)
                    ax += sx[dy + 1, dx + 1] * v
                    ay += sy[dy + 1, dx + 1] * v
            gx[y, x] = ax
            gy[y, x] = ay
    mag = np.hypot(gx, gy)

    tan22 = np.tan(np.pi / 8)
    thin = np.zeros((h, w), dtype=bool)
    for y in range(h):
        for x in range(w):
            m = mag[y, x]
            if m <= 0:
                continue
            axv, ayv = abs(gx[y, x]), abs(gy[y, x])
            if ayv <= axv * tan22:
                n0, n1 = (y, x - 1), (y, x + 1)
            elif axv <= ayv * tan22:
                n0, n1 = (y - 1, x), (y + 1, x)
            elif gx[y, x] * gy[y, x] > 0:
                n0, n1 = (y - 1, x - 1), (y + 1, x + 1)
            else:
                n0, n1 = (y - 1, x + 1), (y + 1, x - 1)

            def val(p):
                yy, xx = p
                return mag[yy, xx] if 0 <= yy < h and 0 <= xx < w else 0.0

            if m > val(n0) and m >= val(n1):
                thin[y, x] = True

    strong = thin & (mag >= high)
    weak = thin & (mag >= low)
    out = np.zeros((h, w), dtype=bool)
    stack = list(zip(*np.nonzero(strong)))
    out[strong] = True
    while stack:
        y, x = stack.pop()
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                ny, nx_ = y + dy, x + dx
                if 0 <= ny < h and 0 <= nx_ < w and weak[ny, nx_] and not out[ny, nx_]:
                    out[ny, nx_] = True
                    stack.append((ny, nx_))
    return out
