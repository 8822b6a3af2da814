from enum import Enum

from pydantic import BaseModel, Field


class MorphMethod(str, Enum):
    disparity = "disparity"
    deepflow = "deepflow"  # pyramidal variational flow


class MorphParams(BaseModel):
    method: MorphMethod = Field(MorphMethod.disparity, description="Correspondence backend")
    subsampling: int = Field(1, ge=1, description="Estimate the field on images downscaled by this factor")
    block_radius: int = Field(4, ge=1, description="Half-window of the disparity block matcher")
    max_displacement: int = Field(32, ge=1, description="Largest displacement searched / kept, pixels")
    smoothing_weight: float = Field(15.0, gt=0, description="Flow regularization weight")
    iterations: int = Field(64, ge=1, description="Flow relaxation sweeps per pyramid level")

    class Config:
        frozen = True
