import time
from contextlib import contextmanager
from typing import Iterator, List, TextIO

from ..schemas.timing import STAGE_LABELS, Stage, TimingReport


class StageClock:
    """Filled in when the `timed` block exits."""

    def __init__(self, stage: Stage):
        self.stage = stage
        self.report: TimingReport | None = None


@contextmanager
def timed(stage: Stage, sink: List[TimingReport] | None = None) -> Iterator[StageClock]:
    """Measure CPU (process) and wall time of the enclosed block."""
    clock = StageClock(stage)
    cpu_start = time.process_time()
    wall_start = time.perf_counter()
    try:
        yield clock
    finally:
        clock.report = TimingReport(
            stage=stage,
            cpu_seconds=max(0.0, time.process_time() - cpu_start),
            wall_seconds=max(0.0, time.perf_counter() - wall_start),
        )
        if sink is not None:
            sink.append(clock.report)


def format_timing(report: TimingReport, label: str | None = None) -> str:
    return (
        f"{label or STAGE_LABELS[report.stage]}\n"
        f"Elapsed time (cpu time): {report.cpu_seconds:.6f} s\n"
        f"Elapsed time (wall clock): {report.wall_seconds:.6f} s"
    )


def emit_timings(reports: List[TimingReport], stream: TextIO, deep: bool = False) -> None:
    for report in reports:
        if deep and report.stage == Stage.processing:
            print("Deepflow mode enabled", file=stream)
        print(format_timing(report), file=stream)
    stream.flush()
