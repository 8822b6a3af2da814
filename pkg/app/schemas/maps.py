import re

from pydantic import BaseModel, Field, field_validator
from typing import Any, Dict

# Map names become file names under the store directory
NAME_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]{0,99}$")


class MapCreate(BaseModel):
    name: str = Field(..., min_length=1, max_length=100, description="Unique map name")
    calibration: Dict[str, Any] = Field(..., description="Device calibration object as in the .json file")
    quilt: str = Field("8x4", description="Quilt mask, columns x rows (e.g. '9x5')")
    resolution: str = Field("256x512", description="View resolution, ROWSxCOLS (e.g. '240x320')")

    @field_validator("name")
    @classmethod
    def validate_name(cls, v: str) -> str:
        if not NAME_PATTERN.match(v):
            raise ValueError("name may contain letters, digits, '_' and '-' only")
        return v


class MapResponse(BaseModel):
    name: str
    native_width: int
    native_height: int
    quilt: str
    resolution: str
    total_views: int
    entries: int
