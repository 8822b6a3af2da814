from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from ..schemas.quilt import QuiltLayout


class SubpixelCoord(NamedTuple):
    x: int  # pixel column
    y: int  # pixel row
    c: int  # 0=R, 1=G, 2=B


class LutMap(BaseModel):
    """Precomputed native-subpixel -> quilt-sample table.

    `entries[(y * native_width + x) * 3 + c]` is the flat sample index in the
    quilt raster that feeds subpixel (x, y, c). Entries always point at the
    same colour channel they feed.
    """

    native_width: int = Field(..., ge=1)
    native_height: int = Field(..., ge=1)
    layout: QuiltLayout
    entries: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @model_validator(mode="after")
    def validate_entries(self):
        entries = self.entries
        if not isinstance(entries, np.ndarray) or entries.dtype != np.uint32 or entries.ndim != 1:
            raise ValueError("entries must be a 1-D uint32 array")
        expected = self.native_width * self.native_height * 3
        if entries.size != expected:
            raise ValueError(f"entries length {entries.size} != {expected}")
        if int(entries.max()) >= self.layout.sample_count:
            raise ValueError("entry beyond the quilt sample range")
        entries.flags.writeable = False
        return self

    @property
    def native_size(self) -> tuple[int, int]:
        return self.native_width, self.native_height

    def entry(self, sub: SubpixelCoord) -> int:
        return int(self.entries[(sub.y * self.native_width + sub.x) * 3 + sub.c])

    def channels_preserved(self) -> bool:
        channel = np.tile(np.arange(3, dtype=np.uint32), self.native_width * self.native_height)
        return bool(np.array_equal(self.entries % 3, channel))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LutMap):
            return NotImplemented
        return (
            self.native_size == other.native_size
            and self.layout == other.layout
            and bool(np.array_equal(self.entries, other.entries))
        )

    def __repr__(self) -> str:
        return (
            f"LutMap(native={self.native_width}x{self.native_height}, "
            f"quilt={self.layout.mask()}, views={self.layout.view_width}x{self.layout.view_height})"
        )
