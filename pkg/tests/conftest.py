import json

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from app.models.image import Image

# Device calibration exactly as shipped with a 2560x1600 panel
CALIBRATION_LISTING = (
    '{"configVersion":"1.0","serial":"LKG-2K-02491","pitch":{"value":47.56159591674805},'
    '"slope":{"value":-5.5113043785095219},"center":{"value":-0.09782609343528748},'
    '"viewCone":{"value":40.0},"invView":{"value":1.0},"verticalAngle":{"value":0.0},"DPI":{"value":'
    '338.0},"screenW":{"value":2560.0},"screenH":{"value":1600.0},"flipImageX":{"value":0.0},'
    '"flipImageY":{"value":0.0},"flipSubp":{"value":0.0}}'
)

FILE_SOURCE_INI = """[camera]
devNumber=-1
width=320
height=180
fps=8
file="video_rescaled.mp4"
[processing]
width=256
height=128
[native]
width=2560
height=1600
"""

SINGLE_DEVICE_INI = """[camera]
devNumber=2
width=320
height=180
fps=8
[processing]
width=256
height=128
[native]
width=2560
height=1600
"""

DUAL_DEVICE_INI = """[camera]
width=320
height=180
fps=8
[camera0]
devNumber=2
[camera1]
devNumber=4
[processing]
width=256
height=128
[native]
width=2560
height=1600
"""


def calibration_with(**overrides) -> dict:
    """The shipped calibration with some wrapped values replaced."""
    raw = json.loads(CALIBRATION_LISTING)
    for key, value in overrides.items():
        raw[key] = {"value": value}
    return raw


@pytest.fixture
def calibration_text() -> str:
    return CALIBRATION_LISTING


@pytest.fixture
def small_calibration() -> dict:
    """Same lens geometry on a 64x40 panel, small enough for per-test map builds."""
    return calibration_with(screenW=64.0, screenH=40.0)


@pytest.fixture
def make_textured():
    """Factory for smooth random RGB textures stretched to the full 0..255 range."""

    def make(width: int, height: int, seed: int = 0, sigma: float = 2.0) -> np.ndarray:
        rng = np.random.default_rng(seed)
        planes = []
        for _ in range(3):
            smooth = gaussian_filter(rng.random((height, width)), sigma=sigma, mode="reflect")
            smooth = (smooth - smooth.min()) / (smooth.max() - smooth.min()) * 255.0
            planes.append(np.floor(smooth + 0.5))
        return np.stack(planes, axis=2).astype(np.uint8)

    return make


@pytest.fixture
def random_image():
    def make(width: int, height: int, seed: int = 0) -> Image:
        rng = np.random.default_rng(seed)
        return Image(pixels=rng.integers(0, 256, (height, width, 3), dtype=np.uint8))

    return make


@pytest.fixture
def calibration_builder():
    return calibration_with


@pytest.fixture
def file_source_ini() -> str:
    return FILE_SOURCE_INI


@pytest.fixture
def single_device_ini() -> str:
    return SINGLE_DEVICE_INI


@pytest.fixture
def dual_device_ini() -> str:
    return DUAL_DEVICE_INI
