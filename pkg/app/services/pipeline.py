import logging
import sys
import time
from pathlib import Path
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, TextIO, Tuple, Union

from ..errors import (
    CountMismatch,
    DimensionMismatch,
    EmptySource,
    HoloquiltError,
    InputFileNotFound,
    InvariantViolation,
    IOFailure,
    StreamAborted,
)
from ..models.image import Image
from ..models.lutmap import LutMap
from ..schemas.calibration import MappingParams
from ..schemas.morph import MorphMethod, MorphParams
from ..schemas.quilt import QuiltLayout
from ..schemas.stream import DualDeviceSource, FileSource, SingleDeviceSource, StreamConfig
from ..schemas.timing import BenchmarkRow, MappingBenchmark, Stage, StreamSummary, TimingReport
from .imaging import ImagingService
from .lenmap import LenmapService
from .morph import MorphService
from .quilt import QuiltService
from .timing import emit_timings, timed

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class FrameResult(NamedTuple):
    native: Image
    quilt: Image
    timings: List[TimingReport]


class FrameSource:
    """
    Ordered stereo frames read from PNG directories.

    `side_by_side` sources hold one L|R frame per file; `dual` sources hold
    matching left and right sequences. Frames are sorted by file name.
    """

    def __init__(self, kind: str, frames: List[Tuple[Path, ...]]):
        self.kind = kind
        self.frames = frames
        self.cursor = 0
        self._dims: dict[int, Tuple[int, int]] = {}

    @staticmethod
    def _pngs(directory: Path) -> List[Path]:
        if not directory.is_dir():
            raise InputFileNotFound(directory)
        return sorted(directory.glob("*.png"))

    @classmethod
    def side_by_side(cls, directory: PathLike) -> "FrameSource":
        return cls("side_by_side", [(path,) for path in cls._pngs(Path(directory))])

    @classmethod
    def dual(cls, left_dir: PathLike, right_dir: PathLike) -> "FrameSource":
        lefts, rights = cls._pngs(Path(left_dir)), cls._pngs(Path(right_dir))
        if len(lefts) != len(rights):
            raise CountMismatch(len(lefts), len(rights), what="right frames")
        return cls("dual", list(zip(lefts, rights)))

    @classmethod
    def from_config(cls, cfg: StreamConfig, frames_root: PathLike = ".", config_dir: PathLike = ".") -> "FrameSource":
        """Resolve the configured source to frame directories.

        A file source names a directory of frames, or a video whose frames
        were extracted next to it into a directory named after its stem.
        Device numbers N resolve to <frames_root>/video<N>.
        """
        source = cfg.source
        frames_root = Path(frames_root)
        if isinstance(source, FileSource):
            path = Path(source.path)
            if not path.is_absolute():
                path = Path(config_dir) / path
            if path.is_dir():
                return cls.side_by_side(path)
            extracted = path.with_suffix("")
            if extracted.is_dir():
                return cls.side_by_side(extracted)
            raise IOFailure(
                f"{path} is not a frame directory; extract frames first: "
                f"ffmpeg -i {path} {extracted}/%06d.png"
            )
        if isinstance(source, SingleDeviceSource):
            return cls.side_by_side(frames_root / f"video{source.dev_number}")
        if isinstance(source, DualDeviceSource):
            return cls.dual(frames_root / f"video{source.dev0}", frames_root / f"video{source.dev1}")
        raise InvariantViolation("source", f"unsupported source {source!r}")

    def __len__(self) -> int:
        return len(self.frames)

    def _check_dims(self, stream: int, image: Image, index: int) -> None:
        expected = self._dims.setdefault(stream, image.size)
        if image.size != expected:
            raise DimensionMismatch(
                f"Frame {index} of stream {stream} is {image.width}x{image.height}, "
                f"earlier frames are {expected[0]}x{expected[1]}",
                index=index,
            )

    def load(self, index: int) -> Tuple[Image, Image]:
        paths = self.frames[index]
        if self.kind == "side_by_side":
            frame = ImagingService.load_png(paths[0])
            self._check_dims(0, frame, index)
            return ImagingService.split_side_by_side(frame)
        left, right = ImagingService.load_png(paths[0]), ImagingService.load_png(paths[1])
        self._check_dims(0, left, index)
        self._check_dims(1, right, index)
        return left, right

    def read_next(self) -> Optional[Tuple[Image, Image]]:
        if self.cursor >= len(self.frames):
            return None
        pair = self.load(self.cursor)
        self.cursor += 1
        return pair

    def __iter__(self) -> Iterator[Tuple[Image, Image]]:
        while True:
            pair = self.read_next()
            if pair is None:
                return
            yield pair


class PipelineService:
    """Per-frame stereo -> quilt -> native processing, streaming and benchmarks."""

    @staticmethod
    def process_frame(
        left: Image,
        right: Image,
        lut: LutMap,
        layout: QuiltLayout,
        mparams: MorphParams,
        proc_dims: Tuple[int, int],
    ) -> FrameResult:
        if lut.layout != layout:
            raise DimensionMismatch(f"Map was built for {lut.layout!r}, pipeline layout is {layout!r}")
        if tuple(proc_dims) != (layout.view_width, layout.view_height):
            raise DimensionMismatch(
                f"Processing size {proc_dims[0]}x{proc_dims[1]} differs from the "
                f"{layout.view_width}x{layout.view_height} quilt views"
            )

        timings: List[TimingReport] = []
        with timed(Stage.processing, timings):
            width, height = proc_dims
            left = ImagingService.resize(left, width, height)
            right = ImagingService.resize(right, width, height)
            views = MorphService.generate_views(left, right, layout.total_views, mparams)
            quilt = QuiltService.assemble_quilt(views, layout)
            native = LenmapService.apply_lut(lut, quilt)
        return FrameResult(native=native, quilt=quilt, timings=timings)

    @staticmethod
    def run_stream(
        config: StreamConfig,
        lut: LutMap,
        layout: QuiltLayout,
        mparams: MorphParams,
        out_dir: PathLike,
        source: Optional[FrameSource] = None,
        frames_root: PathLike = ".",
        config_dir: PathLike = ".",
        stream: Optional[TextIO] = None,
        sleep: Callable[[float], None] = time.sleep,
    ) -> StreamSummary:
        """Process every frame in order, one at a time, pacing to config.fps.

        Frames are never dropped: when processing is slower than the target
        rate the stream simply runs at the achievable rate.
        """
        if (config.native_width, config.native_height) != lut.native_size:
            raise DimensionMismatch(
                f"Config native {config.native_width}x{config.native_height} differs from map native "
                f"{lut.native_width}x{lut.native_height}"
            )
        stream = stream or sys.stderr
        if source is None:
            source = FrameSource.from_config(config, frames_root, config_dir)
        if len(source) == 0:
            raise EmptySource("Frame source holds no frames")

        out_dir = Path(out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise StreamAborted(0, e) from e

        proc_dims = (config.processing_width, config.processing_height)
        period = 1.0 / config.fps
        deep = mparams.method == MorphMethod.deepflow
        walls: List[float] = []

        for index in range(len(source)):
            frame_start = time.perf_counter()
            reports: List[TimingReport] = []
            try:
                with timed(Stage.read, reports):
                    left, right = source.load(index)
            except (HoloquiltError, OSError) as e:
                raise StreamAborted(index, e) from e

            result = PipelineService.process_frame(left, right, lut, layout, mparams, proc_dims)
            reports.extend(result.timings)

            try:
                with timed(Stage.write, reports):
                    ImagingService.save_png(result.native, out_dir / f"{index:06d}.png")
            except (HoloquiltError, OSError) as e:
                raise StreamAborted(index, e) from e

            emit_timings(reports, stream, deep=deep)
            wall = time.perf_counter() - frame_start
            walls.append(wall)
            if wall < period:
                logger.debug("Frame %d took %.4f s, sleeping %.4f s", index, wall, period - wall)
                sleep(period - wall)

        summary = StreamSummary(
            frames=len(walls),
            mean_wall_seconds=sum(walls) / len(walls),
            max_wall_seconds=max(walls),
        )
        logger.info(
            "Streamed %d frame(s): mean %.4f s, max %.4f s per frame",
            summary.frames, summary.mean_wall_seconds, summary.max_wall_seconds,
        )
        return summary

    @staticmethod
    def benchmark_views(
        left: Image,
        right: Image,
        mparams: MorphParams,
        view_counts: Sequence[int],
        proc_dims: Optional[Tuple[int, int]] = None,
    ) -> List[BenchmarkRow]:
        """Time morphing + quilt assembly for each view count (1-column quilts)."""
        if not view_counts:
            raise InvariantViolation("view_counts", "at least one view count is required")
        if any(n < 2 for n in view_counts):
            raise InvariantViolation("view_counts", "every view count must be >= 2")
        if proc_dims is not None:
            left = ImagingService.resize(left, *proc_dims)
            right = ImagingService.resize(right, *proc_dims)

        rows = []
        for n in view_counts:
            layout = QuiltLayout(cols=1, rows=n, view_width=left.width, view_height=left.height)
            with timed(Stage.processing) as clock:
                views = MorphService.generate_views(left, right, n, mparams)
                QuiltService.assemble_quilt(views, layout)
            rows.append(BenchmarkRow(views=n, cpu_s=clock.report.cpu_seconds, wall_s=clock.report.wall_seconds))
            logger.debug("Benchmarked %d views: %.4f s wall", n, clock.report.wall_seconds)
        return rows

    @staticmethod
    def benchmark_csv(rows: Sequence[BenchmarkRow]) -> str:
        lines = ["views,cpu_s,wall_s"]
        lines += [f"{row.views},{row.cpu_s:.6f},{row.wall_s:.6f}" for row in rows]
        return "\n".join(lines) + "\n"

    @staticmethod
    def benchmark_mapping(
        lut: LutMap, quilt: Image, params: Optional[MappingParams] = None, repeats: int = 5
    ) -> MappingBenchmark:
        """Native frames per second through the LUT and, given params, by direct evaluation."""
        start = time.perf_counter()
        for _ in range(repeats):
            LenmapService.apply_lut(lut, quilt)
        lut_rate = repeats / max(time.perf_counter() - start, 1e-9)

        direct_rate = None
        if params is not None:
            start = time.perf_counter()
            for _ in range(repeats):
                LenmapService.render_native_direct(quilt, params, lut.layout, lut.native_width, lut.native_height)
            direct_rate = repeats / max(time.perf_counter() - start, 1e-9)
        return MappingBenchmark(lut_per_second=lut_rate, direct_per_second=direct_rate)
