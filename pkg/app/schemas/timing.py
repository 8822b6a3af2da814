from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field


class Stage(str, Enum):
    read = "read"
    processing = "processing"
    write = "write"


STAGE_LABELS = {
    Stage.read: "Reading files",
    Stage.processing: "Processing step",
    Stage.write: "Writing file",
}


class TimingReport(BaseModel):
    stage: Stage
    cpu_seconds: float = Field(..., ge=0)
    wall_seconds: float = Field(..., ge=0)


class StreamSummary(BaseModel):
    frames: int
    mean_wall_seconds: float
    max_wall_seconds: float


class BenchmarkRow(BaseModel):
    views: int
    cpu_s: float
    wall_s: float


class MappingBenchmark(BaseModel):
    lut_per_second: float
    direct_per_second: Optional[float] = None

    @property
    def speedup(self) -> Optional[float]:
        if not self.direct_per_second:
            return None
        return self.lut_per_second / self.direct_per_second
