from typing import Annotated, Literal, Union

from pydantic import BaseModel, Field


class SingleDeviceSource(BaseModel):
    """One device emitting side-by-side L|R frames."""

    kind: Literal["single_device"] = "single_device"
    dev_number: int = Field(..., ge=0)

    class Config:
        frozen = True


class DualDeviceSource(BaseModel):
    kind: Literal["dual_device"] = "dual_device"
    dev0: int = Field(..., ge=0)
    dev1: int = Field(..., ge=0)

    class Config:
        frozen = True


class FileSource(BaseModel):
    kind: Literal["file"] = "file"
    path: str = Field(..., min_length=1)

    class Config:
        frozen = True


FrameSourceSpec = Annotated[
    Union[SingleDeviceSource, DualDeviceSource, FileSource],
    Field(discriminator="kind"),
]


class StreamConfig(BaseModel):
    camera_width: int = Field(..., ge=1)
    camera_height: int = Field(..., ge=1)
    fps: int = Field(..., ge=1)
    source: FrameSourceSpec
    processing_width: int = Field(..., ge=1)
    processing_height: int = Field(..., ge=1)
    native_width: int = Field(..., ge=1)
    native_height: int = Field(..., ge=1)

    class Config:
        frozen = True
