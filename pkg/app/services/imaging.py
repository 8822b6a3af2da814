import io
import logging
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from PIL import Image as PILImage, UnidentifiedImageError
from scipy.ndimage import map_coordinates

from ..errors import (
    DecodeFailure,
    InputFileNotFound,
    IOFailure,
    OddWidthError,
    UnsupportedBitDepth,
)
from ..models.image import Image

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
# Modes Pillow reports for 8-bit (or narrower) PNGs
EIGHT_BIT_MODES = {"1", "L", "LA", "P", "PA", "RGB", "RGBA"}


def resize_plane(plane: np.ndarray, new_width: int, new_height: int) -> np.ndarray:
    """Bilinear resize of a 2-D float plane (pixel centres at +0.5, edges clamped)."""
    height, width = plane.shape
    if (width, height) == (new_width, new_height):
        return plane.astype(np.float64, copy=True)

    def centres(src: int, dst: int) -> np.ndarray:
        pos = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
        return np.clip(pos, 0.0, src - 1)

    rows, cols = np.meshgrid(centres(height, new_height), centres(width, new_width), indexing="ij")
    return map_coordinates(plane.astype(np.float64, copy=False), [rows, cols], order=1, mode="nearest")


def round_to_uint8(values: np.ndarray) -> np.ndarray:
    """Round half up and clamp to the 8-bit sample range."""
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


class ImagingService:
    """Raster I/O and the geometric helpers every other service builds on."""

    @staticmethod
    def png_bit_depth(header: bytes) -> int:
        """Bit depth from the IHDR chunk, which PNG requires to come first."""
        if len(header) < 25 or not header.startswith(PNG_SIGNATURE) or header[12:16] != b"IHDR":
            raise DecodeFailure("not a PNG file")
        return struct.unpack_from(">B", header, 24)[0]

    @staticmethod
    def load_png(path: PathLike) -> Image:
        """Load a PNG as 8-bit RGB; gray is expanded, alpha dropped."""
        path = Path(path)
        if not path.is_file():
            raise InputFileNotFound(path)
        try:
            with open(path, "rb") as fh:
                header = fh.read(33)
        except OSError as e:
            raise IOFailure(f"{path}: {e}") from e

        try:
            bit_depth = ImagingService.png_bit_depth(header)
        except DecodeFailure as e:
            raise DecodeFailure(f"{path}: {e}") from e
        if bit_depth > 8:
            raise UnsupportedBitDepth(path, bit_depth)

        try:
            with PILImage.open(path) as pil:
                if pil.mode not in EIGHT_BIT_MODES:
                    raise UnsupportedBitDepth(path, bit_depth)
                pixels = np.asarray(pil.convert("RGB"), dtype=np.uint8)
        except (UnidentifiedImageError, SyntaxError, OSError) as e:
            raise DecodeFailure(f"{path}: {e}") from e
        return Image.from_array(pixels)

    @staticmethod
    def decode_png_bytes(payload: bytes) -> Image:
        """Decode an in-memory PNG (HTTP uploads)."""
        bit_depth = ImagingService.png_bit_depth(payload[:33])
        if bit_depth > 8:
            raise UnsupportedBitDepth("<upload>", bit_depth)
        try:
            with PILImage.open(io.BytesIO(payload)) as pil:
                pixels = np.asarray(pil.convert("RGB"), dtype=np.uint8)
        except (UnidentifiedImageError, SyntaxError, OSError) as e:
            raise DecodeFailure(f"upload: {e}") from e
        return Image.from_array(pixels)

    @staticmethod
    def encode_png_bytes(image: Image) -> bytes:
        buffer = io.BytesIO()
        PILImage.fromarray(np.asarray(image.pixels), mode="RGB").save(buffer, format="PNG")
        return buffer.getvalue()

    @staticmethod
    def save_png(image: Image, path: PathLike) -> None:
        """Write an 8-bit RGB PNG. The parent directory must already exist."""
        path = Path(path)
        if not path.parent.is_dir():
            raise IOFailure(f"Directory does not exist: {path.parent}")
        try:
            PILImage.fromarray(np.asarray(image.pixels), mode="RGB").save(path, format="PNG")
        except OSError as e:
            raise IOFailure(f"{path}: {e}") from e

    @staticmethod
    def resize(image: Image, new_width: int, new_height: int) -> Image:
        """Bilinear resize; identical dimensions return an identical image."""
        if new_width < 1 or new_height < 1:
            raise ValueError(f"Target dimensions must be >= 1, got {new_width}x{new_height}")
        if image.size == (new_width, new_height):
            return image

        out = np.empty((new_height, new_width, 3), dtype=np.uint8)
        for c in range(3):
            out[:, :, c] = round_to_uint8(resize_plane(image.pixels[:, :, c], new_width, new_height))
        return Image(pixels=out)

    @staticmethod
    def split_side_by_side(image: Image) -> Tuple[Image, Image]:
        """Split an L|R frame into its left and right halves."""
        if image.width % 2:
            raise OddWidthError(image.width)
        half = image.width // 2
        return (
            Image.from_array(image.pixels[:, :half]),
            Image.from_array(image.pixels[:, half:]),
        )

    @staticmethod
    def concat_horizontal(left: Image, right: Image) -> Image:
        if left.height != right.height:
            raise ValueError("Images must share a height to be placed side by side")
        return Image(pixels=np.concatenate([left.pixels, right.pixels], axis=1))

    @staticmethod
    def to_gray(image: Image) -> np.ndarray:
        """Luma 0.299R + 0.587G + 0.114B, rounded, as float64."""
        rgb = image.pixels.astype(np.float64)
        luma = rgb[:, :, 0] * 0.299 + rgb[:, :, 1] * 0.587 + rgb[:, :, 2] * 0.114
        return np.floor(luma + 0.5)
