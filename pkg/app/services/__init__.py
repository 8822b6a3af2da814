from .calibration import CalibrationService
from .imaging import ImagingService
from .lenmap import LenmapService
from .morph import MorphService
from .pipeline import FrameSource, PipelineService
from .quilt import QuiltService
from .stream_config import StreamConfigService

__all__ = [
    "CalibrationService",
    "ImagingService",
    "LenmapService",
    "MorphService",
    "FrameSource",
    "PipelineService",
    "QuiltService",
    "StreamConfigService",
]
