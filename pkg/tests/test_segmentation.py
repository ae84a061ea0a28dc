import numpy as np
import pytest

from stillmotion.errors import ClickConflictError
from stillmotion.imagecore import ClickSet, Mask
from stillmotion.kernels import assign_labels
from stillmotion.segmentation import (
    build_feature_field,
    extract_subject,
    kmeans,
    refine_mask,
)

from conftest import make_image
from oracles import best_two_partition_wcss, wcss


def flat_color_image(regions, w, h):
    """Vertical stripes of the given colors, equal widths."""
    img = np.zeros((h, w, 3), np.uint8)
    n = len(regions)
    for i, color in enumerate(regions):
        img[:, i * w // n : (i + 1) * w // n] = color
    return make_image(img)


# ---------------------------------------------------------------------------
# feature field
# ---------------------------------------------------------------------------

def test_features_without_clicks_pass_color_through(two_region_image):
    f = build_feature_field(two_region_image, ClickSet(), weights=(1, 1, 1, 1, 1))
    assert np.array_equal(f.features[:, :, :3], two_region_image.pixels[:, :, :3].astype(float))
    sentinel = float(two_region_image.width + two_region_image.height)
    assert (f.features[:, :, 3] == sentinel).all()
    assert (f.features[:, :, 4] == sentinel).all()


def test_positive_click_distance_345():
    img = make_image(np.zeros((8, 8, 3), np.uint8))
    f = build_feature_field(img, ClickSet(positives=((0, 0),)), weights=(1, 1, 1, 2.0, 1))
    assert f.features[4, 3, 3] == pytest.approx(10.0)  # hypot(3, 4) * weight 2


def test_zero_weight_rejected(two_region_image):
    with pytest.raises(ValueError):
        build_feature_field(two_region_image, ClickSet(), weights=(1, 1, 1, 0, 1))


def test_out_of_bounds_click_rejected(two_region_image):
    with pytest.raises(ValueError):
        build_feature_field(two_region_image, ClickSet(positives=((999, 0),)))


# ---------------------------------------------------------------------------
# kmeans
# ---------------------------------------------------------------------------

def test_identical_pixels_merge_to_one_cluster():
    img = make_image(np.full((3, 3, 3), 77, np.uint8))
    f = build_feature_field(img, ClickSet())
    model = kmeans(f, k=3, seed=1)
    assert model.k == 1
    assert np.array_equal(model.centers[0], f.features[0, 0])
    assert (model.labels == 0).all()


def test_two_color_square_matches_brute_force_optimum():
    img = np.zeros((2, 2, 3), np.uint8)
    img[0, :] = (255, 0, 0)
    img[1, :] = (0, 0, 255)
    f = build_feature_field(make_image(img), ClickSet())
    model = kmeans(f, k=2, seed=0)
    flat = f.features.reshape(-1, 5)
    want_labels, want_obj = best_two_partition_wcss(flat)
    got_obj = wcss(flat, model.labels.ravel())
    assert got_obj == pytest.approx(want_obj, abs=1e-9)
    # exact two-cluster partition with centers at the two colors
    assert model.k == 2
    assert {tuple(c[:3]) for c in model.centers} == {(255.0, 0.0, 0.0), (0.0, 0.0, 255.0)}


def test_k1_closed_form_mean(rng):
    img = make_image(rng.integers(0, 256, (4, 5, 3)).astype(np.uint8))
    f = build_feature_field(img, ClickSet())
    model = kmeans(f, k=1, seed=0)
    assert model.k == 1
    assert np.allclose(model.centers[0], f.features.reshape(-1, 5).mean(axis=0), atol=1e-9)


def test_k_larger_than_pixel_count_rejected():
    img = make_image(np.zeros((2, 2, 3), np.uint8))
    f = build_feature_field(img, ClickSet())
    with pytest.raises(ValueError):
        kmeans(f, k=5, seed=0)


def test_fixed_seed_is_bit_reproducible(two_region_image):
    f = build_feature_field(two_region_image, ClickSet(positives=((5, 5),)))
    a = kmeans(f, k=6, seed=9)
    b = kmeans(f, k=6, seed=9)
    assert np.array_equal(a.centers, b.centers)
    assert np.array_equal(a.labels, b.labels)


def test_small_instances_reach_lloyd_fixpoint(rng):
    # after convergence one more assign/means step changes nothing
    for trial in range(6):
        rgb = rng.integers(0, 3, (3, 4, 3)).astype(np.uint8) * 100
        f = build_feature_field(make_image(rgb), ClickSet())
        model = kmeans(f, k=3, seed=trial)
        flat = f.features.reshape(-1, 5)
        again = assign_labels(flat, model.centers)
        assert np.array_equal(again, model.labels.ravel())
        for c in range(model.k):
            member = flat[again == c]
            assert np.allclose(member.mean(axis=0), model.centers[c], atol=1e-9)


def test_separated_colors_family_matches_brute_force(rng):
    # <= 12 pixels, k <= 3: optimal partition by exhaustive search
    for trial in range(5):
        colors = [(255, 0, 0), (0, 0, 255)]
        rgb = np.zeros((2, 4, 3), np.uint8)
        rgb[0] = colors[0]
        rgb[1] = colors[1]
        f = build_feature_field(make_image(rgb), ClickSet())
        flat = f.features.reshape(-1, 5)
        model = kmeans(f, k=2, seed=trial)
        _, want_obj = best_two_partition_wcss(flat)
        assert wcss(flat, model.labels.ravel()) == pytest.approx(want_obj, abs=1e-9)


# ---------------------------------------------------------------------------
# extract_subject
# ---------------------------------------------------------------------------

def test_positive_click_in_red_half_yields_red_mask(two_region_image):
    clicks = ClickSet(positives=((10, 20),))
    f = build_feature_field(two_region_image, clicks)
    model = kmeans(f, k=6, seed=0)
    mask = extract_subject(model, clicks)
    # color-equality oracle: the red pixels exactly
    red = (two_region_image.pixels[:, :, 0] == 220)
    assert np.array_equal(mask.bits, red)


def test_positive_clicks_always_inside_mask(rng):
    for trial in range(6):
        colors = rng.integers(0, 256, (3, 3)).tolist()
        # keep colors well separated
        colors = [(250, 10, 10), (10, 250, 10), (10, 10, 250)]
        img = flat_color_image(colors, 48, 32)
        clicks = ClickSet(positives=((4, int(rng.integers(32))), (40, int(rng.integers(32)))))
        f = build_feature_field(img, clicks)
        model = kmeans(f, k=5, seed=trial)
        mask = extract_subject(model, clicks)
        for x, y in clicks.positives:
            assert mask.bits[y, x]


def test_zero_positive_clicks_rejected(two_region_image):
    f = build_feature_field(two_region_image, ClickSet())
    model = kmeans(f, k=4, seed=0)
    with pytest.raises(ValueError):
        extract_subject(model, ClickSet(negatives=((1, 1),)))


def test_conflicting_clicks_error(two_region_image):
    clicks = ClickSet(positives=((10, 20),), negatives=((12, 22),))
    f = build_feature_field(two_region_image, clicks)
    model = kmeans(f, k=6, seed=0)
    with pytest.raises(ClickConflictError):
        extract_subject(model, clicks)


def test_negative_click_drops_component_when_another_remains():
    img = flat_color_image([(250, 10, 10), (10, 250, 10), (250, 10, 10)], 48, 32)
    clicks = ClickSet(positives=((8, 16), (40, 16)), negatives=((41, 17),))
    f = build_feature_field(img, clicks)
    model = kmeans(f, k=6, seed=2)
    mask = extract_subject(model, clicks)
    assert mask.bits[16, 8]
    assert not mask.bits[17, 41]
    assert not mask.bits[16, 40]  # its whole component is excluded


# ---------------------------------------------------------------------------
# refine_mask
# ---------------------------------------------------------------------------

def test_refine_identity_at_radius_zero(rng):
    m = Mask(rng.random((12, 12)) < 0.4)
    assert np.array_equal(refine_mask(m, 0, "all").bits, m.bits)


def test_refine_closes_one_pixel_hole():
    bits = np.zeros((9, 9), bool)
    bits[2:7, 2:7] = True
    bits[4, 4] = False
    out = refine_mask(Mask(bits), 1, "all")
    assert out.bits[4, 4]


def test_refine_largest_keeps_biggest_component():
    bits = np.zeros((12, 12), bool)
    bits[1:6, 1:11] = True  # 50 pixels
    bits[9, 2] = bits[9, 3] = bits[9, 4] = True  # 3 pixels
    out = refine_mask(Mask(bits), 0, "largest")
    expected = np.zeros((12, 12), bool)
    expected[1:6, 1:11] = True
    assert np.array_equal(out.bits, expected)


def test_refine_clicked_requires_clicks():
    with pytest.raises(ValueError):
        refine_mask(Mask(np.ones((4, 4), bool)), 0, "clicked")


def test_refine_largest_is_idempotent(rng):
    for _ in range(15):
        bits = rng.random((16, 16)) < 0.4
        if not bits.any():
            continue
        once = refine_mask(Mask(bits), 2, "largest")
        twice = refine_mask(once, 2, "largest")
        assert np.array_equal(once.bits, twice.bits)


def test_unknown_policy_rejected():
    with pytest.raises(ValueError):
        refine_mask(Mask(np.ones((4, 4), bool)), 0, "everything")
