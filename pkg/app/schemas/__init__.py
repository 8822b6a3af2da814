from .calibration import Calibration, MappingParams, MappingParamsRequest
from .maps import MapCreate, MapResponse
from .morph import MorphMethod, MorphParams
from .quilt import QuiltLayout
from .stream import DualDeviceSource, FileSource, FrameSourceSpec, SingleDeviceSource, StreamConfig
from .timing import BenchmarkRow, MappingBenchmark, Stage, StreamSummary, TimingReport

__all__ = [
    "Calibration",
    "MappingParams",
    "MappingParamsRequest",
    "MapCreate",
    "MapResponse",
    "MorphMethod",
    "MorphParams",
    "QuiltLayout",
    "DualDeviceSource",
    "FileSource",
    "FrameSourceSpec",
    "SingleDeviceSource",
    "StreamConfig",
    "BenchmarkRow",
    "MappingBenchmark",
    "Stage",
    "StreamSummary",
    "TimingReport",
]
