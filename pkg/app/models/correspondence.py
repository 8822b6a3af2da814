from enum import Enum

import numpy as np
from pydantic import BaseModel, model_validator


class FieldMode(str, Enum):
    disparity = "disparity"
    flow = "flow"


class CorrespondenceField(BaseModel):
    """Dense displacement between a stereo pair.

    Displacements follow the stereo disparity convention: the left pixel at
    (x, y) corresponds to the right pixel at (x - dx, y - dy).
    `dx` and `dy` are float64 arrays of shape (height, width).
    """

    mode: FieldMode
    dx: np.ndarray
    dy: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        frozen = True

    @model_validator(mode="after")
    def validate_arrays(self):
        if self.dx.ndim != 2 or self.dx.shape != self.dy.shape:
            raise ValueError("dx and dy must be 2-D arrays of identical shape")
        if self.mode == FieldMode.disparity and np.any(self.dy != 0):
            raise ValueError("disparity fields carry no vertical displacement")
        for array in (self.dx, self.dy):
            array.flags.writeable = False
        return self

    @classmethod
    def zeros(cls, width: int, height: int, mode: FieldMode = FieldMode.disparity) -> "CorrespondenceField":
        return cls(mode=mode, dx=np.zeros((height, width)), dy=np.zeros((height, width)))

    @property
    def width(self) -> int:
        return int(self.dx.shape[1])

    @property
    def height(self) -> int:
        return int(self.dx.shape[0])

    def max_abs(self) -> float:
        return float(max(np.abs(self.dx).max(), np.abs(self.dy).max()))
