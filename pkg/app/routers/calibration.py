from fastapi import APIRouter, HTTPException, status

from ..errors import HoloquiltError
from ..schemas.calibration import MappingParams, MappingParamsRequest
from ..services.calibration import CalibrationService
from ..services.quilt import QuiltService

router = APIRouter(prefix="/calibration", tags=["Calibration"])


@router.post("/mapping-params", response_model=MappingParams)
def derive_mapping_params(request: MappingParamsRequest):
    """
    Derive the lenticular mapping parameters of a device.

    - **calibration**: The device calibration object, wrapped values included
    - **quilt**: Quilt mask, columns x rows; sets the number of views
    - **resolution**: View resolution as ROWSxCOLS
    """
    try:
        calibration = CalibrationService.from_mapping(request.calibration)
        layout = QuiltService.layout_from_flags(request.quilt, request.resolution)
        return CalibrationService.derive_mapping_params(calibration, layout)
    except HoloquiltError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )
