from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, field_validator


class PixelCoord(NamedTuple):
    x: int  # column, left -> right
    y: int  # row, top -> bottom


class Image(BaseModel):
    """8-bit RGB raster, row-major, origin top-left.

    `pixels` is a read-only (height, width, 3) uint8 array; the flat
    sample order of `data` is (y, x, channel).
    """

    pixels: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @field_validator("pixels")
    @classmethod
    def validate_pixels(cls, v: np.ndarray) -> np.ndarray:
        if not isinstance(v, np.ndarray):
            raise ValueError("pixels must be a numpy array")
        if v.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {v.dtype}")
        if v.ndim != 3 or v.shape[2] != 3:
            raise ValueError(f"pixels must have shape (height, width, 3), got {v.shape}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise ValueError("width and height must be at least 1")
        v = np.ascontiguousarray(v).view()
        v.flags.writeable = False
        return v

    @classmethod
    def from_array(cls, array: np.ndarray) -> "Image":
        # Copy so later writes to the caller's buffer cannot leak in
        return cls(pixels=np.array(array, dtype=np.uint8, copy=True))

    @classmethod
    def filled(cls, width: int, height: int, rgb) -> "Image":
        pixels = np.empty((height, width, 3), dtype=np.uint8)
        pixels[...] = np.asarray(rgb, dtype=np.uint8)
        return cls(pixels=pixels)

    @property
    def width(self) -> int:
        return int(self.pixels.shape[1])

    @property
    def height(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def channels(self) -> int:
        return 3

    @property
    def size(self) -> tuple[int, int]:
        return self.width, self.height

    @property
    def data(self) -> np.ndarray:
        """Flat view of the samples, length width * height * 3."""
        return self.pixels.reshape(-1)

    def pixel(self, coord: PixelCoord) -> tuple[int, int, int]:
        r, g, b = self.pixels[coord.y, coord.x]
        return int(r), int(g), int(b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self) -> str:
        return f"Image(width={self.width}, height={self.height})"
