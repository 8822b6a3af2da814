from .calibration import router as calibration_router
from .maps import router as maps_router

__all__ = ["calibration_router", "maps_router"]
