"""The numba kernels must be drop-in bit-identical to the numpy fallbacks;
every pair is exercised on randomized inputs.
"""

import numpy as np
import pytest

from stillmotion.kernels import cpu

jit = pytest.importorskip("stillmotion.kernels.jit")


@pytest.fixture
def rng():
    return np.random.default_rng(777)


def test_min_distance_field_parity(rng):
    for _ in range(5):
        w, h = int(rng.integers(1, 40)), int(rng.integers(1, 40))
        n = int(rng.integers(1, 8))
        pts = np.stack(
            [rng.integers(0, w, n), rng.integers(0, h, n)], axis=1
        ).astype(np.int64)
        assert np.array_equal(
            cpu.min_distance_field(pts, w, h), jit.min_distance_field(pts, w, h)
        )


def test_gauss_seidel_parity(rng):
    for _ in range(4):
        h, w = int(rng.integers(4, 24)), int(rng.integers(4, 24))
        vals = rng.uniform(0, 255, (h, w))
        hole = rng.random((h, w)) < 0.4
        hole[0, 0] = False
        a, b = vals.copy(), vals.copy()
        ra = cpu.gauss_seidel_channel(a, hole, 0.05, 3000, 16)
        rb = jit.gauss_seidel_channel(b, hole, 0.05, 3000, 16)
        assert np.array_equal(a, b)
        assert ra == rb


def test_rasterize_parity(rng):
    from stillmotion.meshanim import make_grid_mesh

    mesh = make_grid_mesh((1.3, 0.7, 29.0, 27.0), 5, 4)
    verts = mesh.vertices + rng.normal(0, 0.9, mesh.vertices.shape)
    tex = rng.integers(0, 256, (32, 32, 4)).astype(np.uint8)
    for bilinear in (False, True):
        t1 = rng.integers(0, 256, (32, 32, 4)).astype(np.uint8)
        t2 = t1.copy()
        c1 = np.zeros((32, 32), np.uint32)
        c2 = np.zeros((32, 32), np.uint32)
        cpu.rasterize_rgba(verts, mesh.uvs, mesh.triangles, tex, t1, bilinear, c1)
        jit.rasterize_rgba(verts, mesh.uvs, mesh.triangles, tex, t2, bilinear, c2)
        assert np.array_equal(t1, t2)
        assert np.array_equal(c1, c2)


def test_nms_and_hysteresis_parity(rng):
    mag = rng.uniform(0, 10, (30, 30))
    gx = rng.normal(size=(30, 30))
    gy = rng.normal(size=(30, 30))
    assert np.array_equal(cpu.nms_mask(mag, gx, gy), jit.nms_mask(mag, gx, gy))
    strong = mag > 8
    weak = mag > 3
    assert np.array_equal(cpu.hysteresis(strong, weak), jit.hysteresis(strong, weak))


def test_label4_parity(rng):
    for p in (0.2, 0.5, 0.8):
        mask = rng.random((25, 31)) < p
        la, ca = cpu.label4(mask)
        lb, cb = jit.label4(mask)
        assert ca == cb
        assert np.array_equal(la, lb)


def test_lzw_parity(rng):
    for n, span in ((1, 2), (500, 4), (20000, 256)):
        data = rng.integers(0, span, n).astype(np.uint8)
        mcs = max(2, int(np.ceil(np.log2(max(span, 2)))))
        assert np.array_equal(cpu.lzw_encode(data, mcs), jit.lzw_encode(data, mcs))


def test_assign_labels_parity(rng):
    feats = rng.normal(size=(4000, 5))
    cents = rng.normal(size=(6, 5))
    assert np.array_equal(cpu.assign_labels(feats, cents), jit.assign_labels(feats, cents))


def test_pipeline_output_backend_independent(tmp_path, rng, monkeypatch):
    # same GIF bytes no matter which backend rendered it
    import json

    from stillmotion.imagecore import save_image, ImageBuffer
    from stillmotion.pipeline import load_config, run_pipeline

    img = np.zeros((48, 48, 4), np.uint8)
    img[:, :24, :3] = (220, 30, 30)
    img[:, 24:, :3] = (30, 30, 220)
    img[:, :, 3] = 255
    save_image(ImageBuffer(img), tmp_path / "in.png")
    cfg = {
        "input": "in.png",
        "clicks": {"positives": [[6, 6]], "negatives": []},
        "segmentation": {"k": 3, "seed": 0},
        "inpaint": {"tolerance": 0.5, "max_iterations": 2000},
        "animation": {"kind": "vwave", "amplitude": 2, "frames": 3, "duration": 0.5},
        "output": {"gif": "out.gif", "delay_cs": 4},
        "workdir": "work",
    }
    (tmp_path / "cfg.json").write_text(json.dumps(cfg))

    import subprocess
    import sys

    outputs = {}
    for backend in ("numpy", "numba"):
        out = tmp_path / backend
        env_cmd = [
            sys.executable,
            "-c",
            (
                "from stillmotion.pipeline import load_config, run_pipeline;"
                f"c = load_config(r'{tmp_path / 'cfg.json'}', {{'output.gif': r'{out}.gif', 'workdir': r'{out}-work'}});"
                "run_pipeline(c)"
            ),
        ]
        env = dict(**__import__("os").environ, STILLMOTION_BACKEND=backend)
        subprocess.run(env_cmd, check=True, env=env, capture_output=True)
        outputs[backend] = (tmp_path / f"{backend}.gif").read_bytes()
    assert outputs["numpy"] == outputs["numba"]
