import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import ValidationError

from ..errors import IOFailure, InvariantViolation, MalformedJSON, MissingField
from ..schemas.calibration import Calibration, MappingParams
from ..schemas.quilt import QuiltLayout

logger = logging.getLogger(__name__)

# Key order of the device listing; string fields are written bare
CALIBRATION_KEYS = [
    "configVersion", "serial", "pitch", "slope", "center", "viewCone", "invView",
    "verticalAngle", "DPI", "screenW", "screenH", "flipImageX", "flipImageY", "flipSubp",
]
STRING_KEYS = {"configVersion", "serial"}


class CalibrationService:
    """
    Device calibration handling.

    The calibration file wraps every numeric field as {"value": x}. The
    mapping parameters derived from it follow the convention used by the
    display family's own quilt renderers:

    - pitch_px  = pitch * (screenW / DPI) * cos(atan(1 / |slope|))
    - tan_alpha = screenH / (screenW * slope), negated when flipImageX = 1
    - offset    = center (lens periods)
    """

    @staticmethod
    def unwrap(value: Any) -> Any:
        if isinstance(value, dict) and "value" in value:
            return value["value"]
        return value

    @staticmethod
    def parse_calibration(json_text: str) -> Calibration:
        """Parse calibration JSON; unknown keys are ignored."""
        try:
            raw = json.loads(json_text)
        except json.JSONDecodeError as e:
            raise MalformedJSON(f"Calibration is not valid JSON: {e}") from e
        if not isinstance(raw, dict):
            raise MalformedJSON("Calibration must be a JSON object")
        return CalibrationService.from_mapping(raw)

    @staticmethod
    def from_mapping(raw: Dict[str, Any]) -> Calibration:
        values = {key: CalibrationService.unwrap(value) for key, value in raw.items()}
        try:
            return Calibration.model_validate(values)
        except ValidationError as e:
            error = e.errors()[0]
            name = str(error["loc"][0]) if error["loc"] else "calibration"
            if error["type"] == "missing":
                raise MissingField(name) from e
            raise InvariantViolation(name, error["msg"]) from e

    @staticmethod
    def load_calibration(path: Union[str, Path]) -> Calibration:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise IOFailure(f"Cannot read calibration {path}: {e}") from e
        return CalibrationService.parse_calibration(text)

    @staticmethod
    def serialize_calibration(cal: Calibration) -> str:
        """Write the wrapped-value schema of the device listing."""
        dumped = cal.model_dump(by_alias=True)
        payload = {}
        for key in CALIBRATION_KEYS:
            value = dumped[key]
            payload[key] = value if key in STRING_KEYS else {"value": value}
        return json.dumps(payload)

    @staticmethod
    def derive_mapping_params(cal: Calibration, layout: QuiltLayout) -> MappingParams:
        screen_inches = cal.screen_w / cal.dpi
        pitch_px = cal.pitch * screen_inches * math.cos(math.atan(1.0 / abs(cal.slope)))
        tan_alpha = cal.screen_h / (cal.screen_w * cal.slope)
        if cal.flip_image_x == 1.0:
            tan_alpha = -tan_alpha

        params = MappingParams(
            pitch_px=pitch_px,
            tan_alpha=tan_alpha,
            offset=cal.center,
            total_views=layout.total_views,
            flip_x=cal.flip_image_x == 1.0,
            flip_y=cal.flip_image_y == 1.0,
            flip_subpixel=cal.flip_subp == 1.0,
            inverted_views=cal.inv_view == 1.0,
            native_width=int(round(cal.screen_w)),
            native_height=int(round(cal.screen_h)),
        )
        logger.debug(
            "Mapping params for %s: %.4f lenses across, tan_alpha %.6f, %d views",
            cal.serial, params.pitch_px, params.tan_alpha, params.total_views,
        )
        return params
