import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from stillmotion.errors import EmptyImageError, ImageDecodeError
from stillmotion.imagecore import (
    ClickSet,
    ImageBuffer,
    Mask,
    canny_edges,
    connected_components,
    dilate,
    distance_transform,
    erode,
    load_image,
    save_image,
    sobel_gradient,
)

from conftest import make_image, random_image
from oracles import brute_distance_field, decode_png, flood_fill_labels, same_partition


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------

def test_image_buffer_rejects_zero_dims():
    with pytest.raises(ValueError):
        ImageBuffer(np.zeros((0, 4, 4), np.uint8))


def test_clickset_rejects_overlap():
    with pytest.raises(ValueError):
        ClickSet(positives=((1, 2),), negatives=((1, 2),))


def test_clickset_json_round_trip():
    c = ClickSet(positives=((1, 2), (3, 4)), negatives=((5, 6),))
    assert ClickSet.from_json_obj(c.to_json_obj()) == c


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def test_load_1x1_white_png(tmp_path):
    p = tmp_path / "white.png"
    Image.new("RGB", (1, 1), (255, 255, 255)).save(p)
    buf = load_image(p)
    assert (buf.width, buf.height) == (1, 1)
    assert tuple(buf.pixels[0, 0]) == (255, 255, 255, 255)


def test_load_hand_encoded_ppm(tmp_path):
    # 2x2 P6 with known bytes, alpha promoted to 255
    pixels = bytes([255, 0, 0, 0, 255, 0, 0, 0, 255, 9, 8, 7])
    p = tmp_path / "two.ppm"
    p.write_bytes(b"P6\n2 2\n255\n" + pixels)
    buf = load_image(p)
    expected = np.array(
        [[[255, 0, 0, 255], [0, 255, 0, 255]], [[0, 0, 255, 255], [9, 8, 7, 255]]],
        dtype=np.uint8,
    )
    assert np.array_equal(buf.pixels, expected)


def test_load_truncated_png_is_decode_error(tmp_path):
    p = tmp_path / "broken.png"
    full = io.BytesIO()
    Image.new("RGB", (16, 16)).save(full, format="PNG")
    p.write_bytes(full.getvalue()[:40])
    with pytest.raises(ImageDecodeError):
        load_image(p)


def test_load_missing_file_is_distinct():
    with pytest.raises(FileNotFoundError):
        load_image("/nonexistent/image.png")


def test_zero_dimension_ppm_is_distinct(tmp_path):
    p = tmp_path / "zero.ppm"
    p.write_bytes(b"P6\n0 4\n255\n")
    with pytest.raises(EmptyImageError):
        load_image(p)


def test_save_load_round_trip_bit_identical(tmp_path, rng):
    buf = ImageBuffer(rng.integers(0, 256, (5, 7, 4)).astype(np.uint8))
    p = tmp_path / "rt.png"
    save_image(buf, p)
    assert np.array_equal(load_image(p).pixels, buf.pixels)


def test_save_to_unwritable_path_raises(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        save_image(make_image(np.zeros((2, 2, 3), np.uint8)), blocker / "sub" / "x.png")


def test_saved_png_readable_by_independent_decoder(tmp_path):
    grad = np.arange(3 * 2 * 3, dtype=np.uint8).reshape(2, 3, 3) * 10
    buf = make_image(grad)
    p = tmp_path / "grad.png"
    save_image(buf, p)
    decoded = decode_png(p.read_bytes())
    assert decoded.shape == (2, 3, 4)
    assert np.array_equal(decoded, buf.pixels)


def test_ppm_save_round_trip(tmp_path):
    buf = make_image(np.arange(12, dtype=np.uint8).reshape(2, 2, 3))
    p = tmp_path / "x.ppm"
    save_image(buf, p)
    assert np.array_equal(load_image(p).pixels, buf.pixels)


# ---------------------------------------------------------------------------
# distance transform
# ---------------------------------------------------------------------------

def test_distance_to_self_is_zero():
    f = distance_transform([(0, 0)], 3, 3)
    assert f.values[0, 0] == 0.0


def test_distance_corner_to_corner():
    # derived with the brute-force oracle: hypot(2, 2) = 2*sqrt(2)
    f = distance_transform([(0, 0)], 3, 3)
    assert f.values[2, 2] == pytest.approx(2.8284271247461903, abs=1e-12)


def test_empty_clicks_yield_sentinel():
    f = distance_transform([], 4, 4)
    assert (f.values == 8.0).all()


def test_out_of_bounds_click_rejected():
    with pytest.raises(ValueError):
        distance_transform([(4, 0)], 4, 4)


def test_distance_matches_brute_force_exhaustively(rng):
    for _ in range(8):
        w = int(rng.integers(1, 33))
        h = int(rng.integers(1, 33))
        n = int(rng.integers(1, 6))
        clicks = [(int(rng.integers(w)), int(rng.integers(h))) for _ in range(n)]
        got = distance_transform(clicks, w, h).values
        want = brute_distance_field(clicks, w, h)
        assert np.max(np.abs(got - want)) <= 1e-9


# ---------------------------------------------------------------------------
# sobel
# ---------------------------------------------------------------------------

def test_sobel_constant_image_is_zero(rng):
    buf = make_image(np.full((9, 9, 3), 123, np.uint8))
    assert (sobel_gradient(buf).values == 0).all()


def test_sobel_step_edge_magnitude():
    img = np.zeros((8, 8, 3), np.uint8)
    img[:, 4:] = 255
    g = sobel_gradient(make_image(img)).values
    # hand convolution: columns adjacent to the step see |Gx| = 255*4 = 1020
    assert g[3, 3] == pytest.approx(1020.0)
    assert g[3, 4] == pytest.approx(1020.0)
    # rows are identical, so Gy contributes nothing anywhere
    from stillmotion.imagecore import sobel_xy

    _, gy = sobel_xy(make_image(img))
    assert (gy == 0).all()


def test_sobel_transpose_symmetry(rng):
    rgb = rng.integers(0, 256, (7, 11, 3)).astype(np.uint8)
    a = sobel_gradient(make_image(rgb)).values
    b = sobel_gradient(make_image(rgb.transpose(1, 0, 2))).values
    assert np.allclose(a.T, b, atol=1e-9)


def test_sobel_too_small_rejected():
    with pytest.raises(ValueError):
        sobel_gradient(make_image(np.zeros((2, 2, 3), np.uint8)))


# ---------------------------------------------------------------------------
# canny
# ---------------------------------------------------------------------------

def test_canny_constant_image_empty():
    buf = make_image(np.full((16, 16, 3), 200, np.uint8))
    assert canny_edges(buf, 50, 200).area() == 0


def test_canny_half_black_half_white_single_line():
    # frozen from the plain-loop reference: a one-pixel-wide line at column 3
    img = np.zeros((8, 8, 3), np.uint8)
    img[:, 4:] = 255
    edges = canny_edges(make_image(img), 50, 200)
    expected = np.zeros((8, 8), bool)
    expected[:, 3] = True
    assert np.array_equal(edges.bits, expected)


def test_canny_threshold_order_enforced():
    with pytest.raises(ValueError):
        canny_edges(make_image(np.zeros((8, 8, 3), np.uint8)), 10, 5)


# ---------------------------------------------------------------------------
# morphology
# ---------------------------------------------------------------------------

def test_dilate_radius_zero_identity(rng):
    m = Mask(rng.random((10, 12)) < 0.3)
    assert np.array_equal(dilate(m, 0).bits, m.bits)
    assert np.array_equal(erode(m, 0).bits, m.bits)


def test_dilate_single_pixel_radius_one_plus_shape():
    bits = np.zeros((5, 5), bool)
    bits[2, 2] = True
    got = dilate(Mask(bits), 1).bits
    expected = np.zeros((5, 5), bool)
    for dy, dx in ((0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)):
        expected[2 + dy, 2 + dx] = True
    assert np.array_equal(got, expected)


def test_closing_contains_original(rng):
    # brute-force check on random 16x16 masks
    for _ in range(25):
        bits = rng.random((16, 16)) < 0.35
        for r in (1, 2):
            closed = erode(dilate(Mask(bits), r), r).bits
            assert (closed | ~bits).all()  # closed superset of bits


def test_negative_radius_rejected():
    with pytest.raises(ValueError):
        dilate(Mask(np.zeros((3, 3), bool)), -1)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**36 - 1), st.integers(1, 2))
def test_morphology_monotone_and_dual(seed_bits, radius):
    rng = np.random.default_rng(seed_bits)
    m1 = rng.random((6, 6)) < 0.35
    m2 = m1 | (rng.random((6, 6)) < 0.2)
    d1, d2 = dilate(Mask(m1), radius).bits, dilate(Mask(m2), radius).bits
    e1, e2 = erode(Mask(m1), radius).bits, erode(Mask(m2), radius).bits
    assert (d1 <= d2).all() and (e1 <= e2).all()  # monotone
    # duality on complements
    assert np.array_equal(erode(Mask(m1), radius).bits, ~dilate(Mask(~m1), radius).bits)
    assert np.array_equal(dilate(Mask(m1), radius).bits, ~erode(Mask(~m1), radius).bits)


# ---------------------------------------------------------------------------
# connected components
# ---------------------------------------------------------------------------

def test_components_empty_mask():
    labels, count = connected_components(Mask(np.zeros((4, 4), bool)))
    assert count == 0 and (labels == 0).all()


def test_components_diagonal_pixels_are_separate():
    bits = np.zeros((4, 4), bool)
    bits[1, 1] = bits[2, 2] = True
    _, count = connected_components(Mask(bits))
    assert count == 2


def test_components_match_flood_fill_oracle(rng):
    for _ in range(20):
        bits = rng.random((12, 12)) < 0.45
        labels, count = connected_components(Mask(bits))
        want_labels, want_count = flood_fill_labels(bits)
        assert count == want_count
        assert same_partition(labels, want_labels)
        # labels dense from 1, background 0
        present = np.unique(labels)
        assert present[0] == 0 or count > 0
        assert set(present.tolist()) <= set(range(count + 1))
        assert np.array_equal(labels > 0, bits)
