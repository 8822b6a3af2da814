from fastapi import APIRouter, Body, Depends, HTTPException, Response, status
from typing import List

from ..errors import HoloquiltError
from ..schemas.maps import MapCreate, MapResponse
from ..services.calibration import CalibrationService
from ..services.imaging import ImagingService
from ..services.lenmap import LenmapService
from ..services.quilt import QuiltService
from ..store import MapStore, get_store

router = APIRouter(prefix="/maps", tags=["Maps"])


def build_map_response(name: str, lut) -> MapResponse:
    """Helper to build MapResponse from a stored lookup table."""
    return MapResponse(name=name, **LenmapService.describe_map(lut))


def load_or_404(store: MapStore, name: str):
    try:
        lut = store.get(name)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    if lut is None:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Map '{name}' not found"
        )
    return lut


@router.post("", response_model=MapResponse, status_code=status.HTTP_201_CREATED)
def create_map(map_data: MapCreate, store: MapStore = Depends(get_store)):
    """
    Build and store a subpixel lookup table for a device.

    - **name**: Unique name for the map (e.g., "portrait-9x5")
    - **calibration**: The device calibration object, wrapped values included
    - **quilt**: Quilt mask, columns x rows (e.g., "9x5")
    - **resolution**: View resolution as ROWSxCOLS (e.g., "240x320")

    The native size of the map is the calibration's screenW x screenH.
    """
    if store.exists(map_data.name):
        raise HTTPException(
            status_code=status.HTTP_409_CONFLICT,
            detail=f"Map with name '{map_data.name}' already exists"
        )

    try:
        calibration = CalibrationService.from_mapping(map_data.calibration)
        layout = QuiltService.layout_from_flags(map_data.quilt, map_data.resolution)
        params = CalibrationService.derive_mapping_params(calibration, layout)
        lut = LenmapService.build_lut(params, layout, params.native_width, params.native_height)
        store.save(map_data.name, lut)
    except HoloquiltError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )

    return build_map_response(map_data.name, lut)


@router.get("", response_model=List[MapResponse])
def list_maps(store: MapStore = Depends(get_store)):
    """List all stored maps."""
    result = []
    for name in store.names():
        try:
            result.append(build_map_response(name, store.get(name)))
        except HoloquiltError:
            # Unreadable files stay on disk but are not listed
            continue
    return result


@router.get("/{name}", response_model=MapResponse)
def get_map(name: str, store: MapStore = Depends(get_store)):
    """Get the header information of a stored map."""
    lut = load_or_404(store, name)
    return build_map_response(name, lut)


@router.delete("/{name}", status_code=status.HTTP_204_NO_CONTENT)
def delete_map(name: str, store: MapStore = Depends(get_store)):
    """Delete a stored map."""
    try:
        deleted = store.delete(name)
    except ValueError as e:
        raise HTTPException(status_code=status.HTTP_400_BAD_REQUEST, detail=str(e))
    if not deleted:
        raise HTTPException(
            status_code=status.HTTP_404_NOT_FOUND,
            detail=f"Map '{name}' not found"
        )
    return Response(status_code=status.HTTP_204_NO_CONTENT)


@router.post(
    "/{name}/apply",
    response_class=Response,
    responses={200: {"content": {"image/png": {}}}},
)
def apply_map(
    name: str,
    payload: bytes = Body(..., media_type="image/png"),
    store: MapStore = Depends(get_store),
):
    """
    Map a quilt onto the native panel.

    The request body is the quilt as a PNG file; the response is the native
    image as a PNG. The quilt must match the map's layout exactly.
    """
    try:
        lut = load_or_404(store, name)
        quilt = ImagingService.decode_png_bytes(payload)
        native = LenmapService.apply_lut(lut, quilt)
    except HoloquiltError as e:
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=str(e)
        )
    return Response(content=ImagingService.encode_png_bytes(native), media_type="image/png")
