"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py
Both backends are bit-identical (asserted here on every case); this script
only measures speed. First numba call per kernel compiles and is excluded
via a warmup pass.
"""

import time

import numpy as np

from stillmotion.kernels import cpu

try:
    from stillmotion.kernels import jit
except ImportError:
    jit = None

rng = np.random.default_rng(0)


def bench(name, fn_cpu, fn_jit, make_args, n_runs=5, check=None):
    args = make_args()
    if fn_jit is not None:
        fn_jit(*make_args())  # compile

    def timed(fn):
        best = np.inf
        for _ in range(n_runs):
            fresh = make_args()
            t0 = time.perf_counter()
            out = fn(*fresh)
            best = min(best, time.perf_counter() - t0)
        return best, out

    t_cpu, out_cpu = timed(fn_cpu)
    line = f"{name:28s} numpy {t_cpu * 1e3:9.2f} ms"
    if fn_jit is not None:
        t_jit, out_jit = timed(fn_jit)
        line += f"   numba {t_jit * 1e3:9.2f} ms   speedup {t_cpu / t_jit:6.1f}x"
        if check is not None:
            assert check(out_cpu, out_jit), f"{name}: backends disagree"
    print(line)


def main():
    print(f"numba available: {jit is not None}")
    print("-" * 88)

    pts = np.stack([rng.integers(0, 512, 8), rng.integers(0, 512, 8)], axis=1).astype(np.int64)
    bench(
        "distance field 512x512",
        lambda: cpu.min_distance_field(pts, 512, 512),
        (lambda: jit.min_distance_field(pts, 512, 512)) if jit else None,
        lambda: (),
        check=lambda a, b: np.array_equal(a, b),
    )

    h = w = 128
    hole = np.zeros((h, w), bool)
    hole[20:108, 20:108] = True
    base = rng.uniform(0, 255, (h, w))

    def gs_args():
        return (base.copy(), hole, 0.1, 4000, 16)

    bench(
        "gauss-seidel 128x128 hole",
        lambda v, m, t, n, c: (cpu.gauss_seidel_channel(v, m, t, n, c), v)[1],
        (lambda v, m, t, n, c: (jit.gauss_seidel_channel(v, m, t, n, c), v)[1]) if jit else None,
        gs_args,
        n_runs=3,
        check=lambda a, b: np.array_equal(a, b),
    )

    from stillmotion.meshanim import make_grid_mesh

    mesh = make_grid_mesh((0, 0, 256, 256), 24, 24)
    tex = rng.integers(0, 256, (256, 256, 4)).astype(np.uint8)

    def raster_args():
        return (
            mesh.vertices,
            mesh.uvs,
            mesh.triangles,
            tex,
            np.zeros((256, 256, 4), np.uint8),
            True,
            np.zeros((256, 256), np.uint32),
        )

    bench(
        "rasterize 256x256 bilinear",
        lambda *a: (cpu.rasterize_rgba(*a), a[4])[1],
        (lambda *a: (jit.rasterize_rgba(*a), a[4])[1]) if jit else None,
        raster_args,
        check=lambda a, b: np.array_equal(a, b),
    )

    indices = rng.integers(0, 200, 256 * 256).astype(np.uint8)
    bench(
        "lzw encode 64k indices",
        lambda: cpu.lzw_encode(indices, 8),
        (lambda: jit.lzw_encode(indices, 8)) if jit else None,
        lambda: (),
        check=lambda a, b: np.array_equal(a, b),
    )

    mask = rng.random((512, 512)) < 0.5
    bench(
        "label4 512x512",
        lambda: cpu.label4(mask)[0],
        (lambda: jit.label4(mask)[0]) if jit else None,
        lambda: (),
        check=lambda a, b: np.array_equal(a, b),
    )

    feats = rng.normal(size=(256 * 256, 5))
    cents = rng.normal(size=(6, 5))
    bench(
        "kmeans assign 64k x 6",
        lambda: cpu.assign_labels(feats, cents),
        (lambda: jit.assign_labels(feats, cents)) if jit else None,
        lambda: (),
        check=lambda a, b: np.array_equal(a, b),
    )

    mag = rng.uniform(0, 100, (512, 512))
    gx = rng.normal(size=(512, 512))
    gy = rng.normal(size=(512, 512))
    bench(
        "canny nms 512x512",
        lambda: cpu.nms_mask(mag, gx, gy),
        (lambda: jit.nms_mask(mag, gx, gy)) if jit else None,
        lambda: (),
        check=lambda a, b: np.array_equal(a, b),
    )

    strong = mag > 95
    weak = mag > 40
    bench(
        "hysteresis 512x512",
        lambda: cpu.hysteresis(strong, weak),
        (lambda: jit.hysteresis(strong, weak)) if jit else None,
        lambda: (),
        check=lambda a, b: np.array_equal(a, b),
    )


if __name__ == "__main__":
    main()
