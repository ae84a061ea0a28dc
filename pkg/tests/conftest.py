import numpy as np
import pytest

from stillmotion.imagecore import ImageBuffer


def make_image(rgb, alpha=255):
    """ImageBuffer from an (h, w, 3) array-like, constant alpha."""
    rgb = np.asarray(rgb, dtype=np.uint8)
    out = np.empty((rgb.shape[0], rgb.shape[1], 4), dtype=np.uint8)
    out[:, :, :3] = rgb
    out[:, :, 3] = alpha
    return ImageBuffer(out)


def random_image(rng, w, h):
    return ImageBuffer(
        np.dstack(
            [
                rng.integers(0, 256, (h, w, 3)).astype(np.uint8),
                np.full((h, w), 255, np.uint8),
            ]
        )
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_region_image():
    """64x64 red|blue split, the standard segmentation fixture."""
    img = np.zeros((64, 64, 3), np.uint8)
    img[:, :32] = (220, 30, 30)
    img[:, 32:] = (30, 30, 220)
    return make_image(img)
