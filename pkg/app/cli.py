"""
holoquilt command line.

Files in, files out: stereo PNGs to quilts, quilts to native panel images
through a lookup-table map, INI-configured frame streams and benchmarks.
Exit status is 0 on success, 1 when an operation fails and 2 on usage
errors.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .config import get_settings
from .errors import CountMismatch, DimensionMismatch, HoloquiltError, InputFileNotFound
from .log import configure_logging
from .models.image import Image
from .models.lutmap import LutMap
from .schemas.morph import MorphMethod, MorphParams
from .schemas.quilt import QuiltLayout
from .schemas.timing import Stage, TimingReport
from .services.calibration import CalibrationService
from .services.imaging import ImagingService
from .services.lenmap import LenmapService
from .services.morph import MorphService
from .services.pipeline import PipelineService
from .services.quilt import QuiltService
from .services.stream_config import StreamConfigService
from .services.timing import emit_timings, timed

logger = logging.getLogger("holoquilt")

DEFAULT_MASK = "8x4"
DEFAULT_RESOLUTION = "256x512"


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer '{text}'")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number '{text}'")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def view_counts(text: str) -> List[int]:
    """'2:48' is the inclusive range 2..48; '2,4,8' is an explicit list."""
    try:
        if ":" in text:
            start, stop = (int(part) for part in text.split(":", 1))
            counts = list(range(start, stop + 1))
        else:
            counts = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid view counts '{text}'")
    if not counts or any(n < 2 for n in counts):
        raise argparse.ArgumentTypeError(f"view counts must be >= 2, got '{text}'")
    return counts


def morph_params(args: argparse.Namespace) -> MorphParams:
    settings = get_settings()
    return MorphParams(
        method=MorphMethod.deepflow if args.deep else MorphMethod.disparity,
        subsampling=args.subsampling,
        block_radius=args.block_radius or settings.block_radius,
        max_displacement=args.max_displacement or settings.max_displacement,
        smoothing_weight=args.smoothing_weight or settings.smoothing_weight,
        iterations=args.iterations or settings.iterations,
    )


def report_timings(args: argparse.Namespace, reports: List[TimingReport]) -> None:
    if getattr(args, "time", False):
        emit_timings(reports, sys.stderr, deep=getattr(args, "deep", False))


def warn_screen(args: argparse.Namespace) -> None:
    if args.screen is not None:
        logger.warning("headless build: --screen ignored")


def check_mask(mask: str, layout: QuiltLayout) -> None:
    cols, rows = QuiltService.parse_layout(mask)
    if (cols, rows) != (layout.cols, layout.rows):
        raise DimensionMismatch(f"Quilt mask {mask} differs from the map's {layout.mask()} layout")


def check_native_inputs(flag_layout: QuiltLayout, lut: LutMap, quilt: Image) -> None:
    """Compare the layout named on the command line, the map header and the quilt file."""
    map_layout = lut.layout
    quilt_matches = quilt.size == (map_layout.quilt_width, map_layout.quilt_height)
    if flag_layout == map_layout and quilt_matches:
        return

    def describe(layout: QuiltLayout) -> str:
        return (
            f"{layout.mask()} of {layout.resolution()} views "
            f"-> {layout.quilt_width}x{layout.quilt_height} quilt"
        )

    raise DimensionMismatch(
        "Quilt layout mismatch:\n"
        f"  flags:      {describe(flag_layout)}\n"
        f"  map:        {describe(map_layout)}\n"
        f"  quilt file: {quilt.width}x{quilt.height}"
    )


def morph_to_quilt(left: Image, right: Image, layout: QuiltLayout, params: MorphParams) -> Image:
    left = ImagingService.resize(left, layout.view_width, layout.view_height)
    right = ImagingService.resize(right, layout.view_width, layout.view_height)
    views = MorphService.generate_views(left, right, layout.total_views, params)
    return QuiltService.assemble_quilt(views, layout)


def cmd_quilt(args: argparse.Namespace) -> int:
    cols, rows = QuiltService.parse_layout(args.mask)
    reports: List[TimingReport] = []

    with timed(Stage.read, reports):
        left = ImagingService.load_png(args.left)
        right = ImagingService.load_png(args.right)

    if args.resolution:
        view_height, view_width = QuiltService.parse_resolution(args.resolution)
    else:
        view_width, view_height = left.size
    layout = QuiltLayout(cols=cols, rows=rows, view_width=view_width, view_height=view_height)

    with timed(Stage.processing, reports):
        quilt = morph_to_quilt(left, right, layout, morph_params(args))

    with timed(Stage.write, reports):
        ImagingService.save_png(quilt, args.quilt_file)

    report_timings(args, reports)
    logger.info("Wrote %s quilt (%dx%d) to %s", layout.mask(), quilt.width, quilt.height, args.quilt_file)
    return 0


def cmd_map(args: argparse.Namespace) -> int:
    layout = QuiltService.layout_from_flags(args.quilt or DEFAULT_MASK, args.resolution or DEFAULT_RESOLUTION)
    reports: List[TimingReport] = []

    with timed(Stage.read, reports):
        calibration = CalibrationService.load_calibration(args.calibration)

    with timed(Stage.processing, reports):
        params = CalibrationService.derive_mapping_params(calibration, layout)
        lut = LenmapService.build_lut(params, layout, params.native_width, params.native_height)

    with timed(Stage.write, reports):
        LenmapService.save_map(lut, args.map)

    report_timings(args, reports)
    logger.info("Wrote map %s: %s", args.map, LenmapService.describe_map(lut))
    return 0


def cmd_native(args: argparse.Namespace) -> int:
    reports: List[TimingReport] = []

    with timed(Stage.read, reports):
        lut = LenmapService.load_map(args.apply)
        quilt = ImagingService.load_png(args.quilt_file)

    flag_layout = QuiltService.layout_from_flags(
        args.quilt or lut.layout.mask(), args.resolution or lut.layout.resolution()
    )
    check_native_inputs(flag_layout, lut, quilt)

    with timed(Stage.processing, reports):
        native = LenmapService.apply_lut(lut, quilt)

    with timed(Stage.write, reports):
        ImagingService.save_png(native, args.native_file)

    report_timings(args, reports)
    return 0


def cmd_images2native(args: argparse.Namespace) -> int:
    cols, rows = QuiltService.parse_layout(args.quilt)
    directory = Path(args.dir_path)
    if not directory.is_dir():
        raise InputFileNotFound(directory)
    paths = sorted(directory.glob("*.png"))
    if len(paths) != cols * rows:
        raise CountMismatch(cols * rows, len(paths))

    reports: List[TimingReport] = []
    with timed(Stage.read, reports):
        lut = LenmapService.load_map(args.map)
        views = [ImagingService.load_png(path) for path in paths]
    check_mask(args.quilt, lut.layout)

    sizes = {view.size for view in views}
    if len(sizes) > 1:
        first = views[0].size
        index = next(k for k, view in enumerate(views) if view.size != first)
        raise DimensionMismatch(
            f"{paths[index].name} is {views[index].width}x{views[index].height}, "
            f"{paths[0].name} is {first[0]}x{first[1]}",
            index=index,
        )

    with timed(Stage.processing, reports):
        quilt = QuiltService.assemble_quilt(views, lut.layout)
        native = LenmapService.apply_lut(lut, quilt)

    with timed(Stage.write, reports):
        ImagingService.save_png(native, args.native_file)

    report_timings(args, reports)
    return 0


def cmd_display(args: argparse.Namespace) -> int:
    warn_screen(args)
    reports: List[TimingReport] = []

    with timed(Stage.read, reports):
        left = ImagingService.load_png(args.left)
        right = ImagingService.load_png(args.right)
        lut = LenmapService.load_map(args.map)
    check_mask(args.quilt, lut.layout)

    with timed(Stage.processing, reports):
        quilt = morph_to_quilt(left, right, lut.layout, morph_params(args))
        native = LenmapService.apply_lut(lut, quilt)

    with timed(Stage.write, reports):
        ImagingService.save_png(native, args.output)

    report_timings(args, reports)
    return 0


def cmd_stream(args: argparse.Namespace) -> int:
    warn_screen(args)
    config = StreamConfigService.load_stream_config(args.config)
    lut = LenmapService.load_map(args.map)
    cols, rows = QuiltService.parse_layout(args.quilt)
    layout = QuiltLayout(
        cols=cols, rows=rows, view_width=config.processing_width, view_height=config.processing_height
    )
    PipelineService.run_stream(
        config,
        lut,
        layout,
        morph_params(args),
        args.out_dir,
        frames_root=args.frames_root or get_settings().frames_root,
        config_dir=Path(args.config).parent,
    )
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    if args.mapping is None and (args.left is None or args.right is None):
        args.parser.error("bench needs -l and -r, or --mapping MAP")

    if args.left is not None and args.right is not None:
        left = ImagingService.load_png(args.left)
        right = ImagingService.load_png(args.right)
        proc_dims = None
        if args.resolution:
            view_height, view_width = QuiltService.parse_resolution(args.resolution)
            proc_dims = (view_width, view_height)
        rows = PipelineService.benchmark_views(left, right, morph_params(args), args.views, proc_dims)
        sys.stdout.write(PipelineService.benchmark_csv(rows))

    if args.mapping is not None:
        lut = LenmapService.load_map(args.mapping)
        params = None
        if args.calibration:
            calibration = CalibrationService.load_calibration(args.calibration)
            params = CalibrationService.derive_mapping_params(calibration, lut.layout)
        layout = lut.layout
        rng = np.random.default_rng(0)
        quilt = Image(pixels=rng.integers(0, 256, (layout.quilt_height, layout.quilt_width, 3), dtype=np.uint8))
        result = PipelineService.benchmark_mapping(lut, quilt, params, repeats=args.repeats)
        lines = ["mode,frames_per_second", f"lut,{result.lut_per_second:.3f}"]
        if result.direct_per_second is not None:
            lines.append(f"direct,{result.direct_per_second:.3f}")
        sys.stdout.write("\n".join(lines) + "\n")
        if result.speedup is not None:
            logger.info("LUT mapping is %.1fx faster than direct evaluation", result.speedup)

    sys.stdout.flush()
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    settings = get_settings()
    uvicorn.run("app.main:app", host=args.host or settings.host, port=args.port or settings.port)
    return 0


def add_morph_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-d", "--deep", action="store_true", help="Deepflow mode (variational optical flow)")
    parser.add_argument(
        "-s", "--subsampling", type=positive_int, default=1, help="Subsampling factor; speeds up morphing"
    )
    parser.add_argument("--block-radius", type=positive_int, help="Disparity block half-window")
    parser.add_argument("--max-displacement", type=positive_int, help="Largest displacement searched, pixels")
    parser.add_argument("--smoothing-weight", type=positive_float, help="Optical flow regularization")
    parser.add_argument("--iterations", type=positive_int, help="Optical flow sweeps per pyramid level")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(
        prog="holoquilt",
        description="Stereo to quilt to native conversion for slanted-lenticular light field displays",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("quilt", parents=[common], help="Morph a stereo pair into a quilt")
    p.add_argument("-l", "--left", required=True, help="Input left image")
    p.add_argument("-r", "--right", required=True, help="Input right image")
    p.add_argument("-m", "--mask", required=True, help="Mask for quilt, COLSxROWS (e.g. 9x5)")
    p.add_argument("--resolution", help="Resize inputs to ROWSxCOLS before morphing")
    add_morph_flags(p)
    p.add_argument("-t", "--time", action="store_true", help="Show elapsed processing time")
    p.add_argument("quilt_file", help="Output quilt PNG")
    p.set_defaults(handler=cmd_quilt)

    p = subparsers.add_parser("map", parents=[common], help="Build a lookup-table map from a calibration file")
    p.add_argument("-r", "--resolution", help=f"View resolution ROWSxCOLS (default {DEFAULT_RESOLUTION})")
    p.add_argument("-q", "--quilt", help=f"Mask for quilt, COLSxROWS (default {DEFAULT_MASK})")
    p.add_argument("-m", "--map", required=True, help="Save map to file")
    p.add_argument("-t", "--time", action="store_true", help="Show elapsed processing time")
    p.add_argument("calibration", help="Device calibration .json")
    p.set_defaults(handler=cmd_map)

    p = subparsers.add_parser("native", parents=[common], help="Apply a map to a quilt")
    p.add_argument("-q", "--quilt", help="Mask for quilt, COLSxROWS")
    p.add_argument("-r", "--resolution", help="View resolution ROWSxCOLS")
    p.add_argument("-a", "--apply", required=True, help="Apply map to given image")
    p.add_argument("-t", "--time", action="store_true", help="Show elapsed processing time")
    p.add_argument("quilt_file", help="Input quilt PNG")
    p.add_argument("native_file", help="Output native PNG")
    p.set_defaults(handler=cmd_native)

    p = subparsers.add_parser("images2native", parents=[common], help="Assemble sorted view files and apply a map")
    p.add_argument("-q", "--quilt", required=True, help="Mask for quilt, COLSxROWS")
    p.add_argument("-m", "--map", required=True, help="Map file")
    p.add_argument("-t", "--time", action="store_true", help="Show elapsed processing time")
    p.add_argument("dir_path", help="Directory holding the sorted view PNGs")
    p.add_argument("native_file", help="Output native PNG")
    p.set_defaults(handler=cmd_images2native)

    p = subparsers.add_parser("display", parents=[common], help="Stereo pair straight to a native image")
    p.add_argument("-l", "--left", required=True, help="Input left image")
    p.add_argument("-r", "--right", required=True, help="Input right image")
    p.add_argument("-m", "--map", required=True, help="Map quilt to native")
    p.add_argument("-q", "--quilt", required=True, help="Mask for quilt, COLSxROWS")
    add_morph_flags(p)
    p.add_argument("--screen", type=int, help="Screen number; ignored, output goes to -o")
    p.add_argument("-o", "--output", required=True, help="Output native PNG")
    p.add_argument("-t", "--time", action="store_true", help="Show elapsed processing time")
    p.set_defaults(handler=cmd_display)

    p = subparsers.add_parser("stream", parents=[common], help="Process a configured frame stream")
    p.add_argument("-c", "--config", required=True, help="Config file path (.ini)")
    p.add_argument("-m", "--map", required=True, help="Map file")
    p.add_argument("-q", "--quilt", required=True, help="Mask for quilt, COLSxROWS")
    add_morph_flags(p)
    p.add_argument("--screen", type=int, help="Screen number; ignored, output goes to -o")
    p.add_argument("-o", "--out-dir", required=True, help="Directory for the native frames")
    p.add_argument("--frames-root", help="Where video<N> frame directories live")
    p.set_defaults(handler=cmd_stream)

    p = subparsers.add_parser("bench", parents=[common], help="Time quilt generation per view count")
    p.add_argument("-l", "--left", help="Input left image")
    p.add_argument("-r", "--right", help="Input right image")
    p.add_argument("--views", type=view_counts, default=view_counts("2:48"), help="'2:48' or '2,4,8'")
    p.add_argument("--resolution", help="Resize inputs to ROWSxCOLS first")
    add_morph_flags(p)
    p.add_argument("--mapping", help="Also time native mapping with this map file")
    p.add_argument("--calibration", help="Calibration for the direct-evaluation comparison")
    p.add_argument("--repeats", type=positive_int, default=5, help="Native frames per mapping timing")
    p.set_defaults(handler=cmd_bench, parser=p)

    p = subparsers.add_parser("serve", parents=[common], help="Run the HTTP API")
    p.add_argument("--host", help="Bind address")
    p.add_argument("--port", type=int, help="Port")
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging("DEBUG" if args.verbose else get_settings().log_level)

    try:
        return args.handler(args)
    except (HoloquiltError, OSError) as e:
        logger.error("%s", e)
        return 1
