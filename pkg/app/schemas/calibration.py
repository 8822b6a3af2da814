from pydantic import AliasChoices, BaseModel, Field, field_validator
from typing import Any, Dict


class Calibration(BaseModel):
    """Per-device lenticular calibration as shipped in the device .json file.

    Attribute names are snake_case; the JSON keys are the aliases.
    """

    config_version: str = Field(..., alias="configVersion")
    serial: str
    pitch: float = Field(..., gt=0, description="Lenticular lens density as shipped")
    slope: float = Field(..., description="Lens slant, run over rise")
    center: float = Field(..., description="Phase offset of the lens pattern, lens periods")
    view_cone: float = Field(..., alias="viewCone", description="Degrees")
    inv_view: float = Field(..., alias="invView")
    vertical_angle: float = Field(..., alias="verticalAngle", description="Degrees")
    dpi: float = Field(..., gt=0, validation_alias=AliasChoices("DPI", "dpi"), serialization_alias="DPI")
    screen_w: float = Field(..., gt=0, alias="screenW")
    screen_h: float = Field(..., gt=0, alias="screenH")
    flip_image_x: float = Field(..., alias="flipImageX")
    flip_image_y: float = Field(..., alias="flipImageY")
    flip_subp: float = Field(..., alias="flipSubp")

    class Config:
        frozen = True
        populate_by_name = True

    @field_validator("slope")
    @classmethod
    def validate_slope(cls, v: float) -> float:
        if v == 0:
            raise ValueError("slope must be non-zero")
        return v

    @field_validator("inv_view", "flip_image_x", "flip_image_y", "flip_subp")
    @classmethod
    def validate_flag(cls, v: float) -> float:
        if v not in (0.0, 1.0):
            raise ValueError("flag fields must be 0.0 or 1.0")
        return v


class MappingParams(BaseModel):
    """Numeric parameters of the subpixel -> view mapping.

    `pitch_px` is the lens density projected onto the panel: the number of
    lens periods spanning the native width. One lens period therefore covers
    `native_width / pitch_px` pixels, i.e. three times that in subpixels.
    `tan_alpha` is the slant measured in normalized panel coordinates
    (horizontal travel as a fraction of the width per full panel height).
    """

    pitch_px: float = Field(..., gt=0)
    tan_alpha: float
    offset: float = Field(..., description="Phase offset i_off, lens periods")
    total_views: int = Field(..., ge=1)
    flip_x: bool = False
    flip_y: bool = False
    flip_subpixel: bool = False
    inverted_views: bool = False
    native_width: int = Field(..., ge=1)
    native_height: int = Field(..., ge=1)

    class Config:
        frozen = True

    @property
    def lens_period_subpixels(self) -> float:
        return 3.0 * self.native_width / self.pitch_px

    def for_native(self, native_width: int, native_height: int) -> "MappingParams":
        if (native_width, native_height) == (self.native_width, self.native_height):
            return self
        return self.model_copy(update={"native_width": native_width, "native_height": native_height})


class MappingParamsRequest(BaseModel):
    calibration: Dict[str, Any] = Field(..., description="Device calibration object as in the .json file")
    quilt: str = Field(..., description="Quilt mask, e.g. '9x5' (columns x rows)")
    resolution: str = Field("240x320", description="View resolution ROWSxCOLS")
