import logging
import math
import struct
from pathlib import Path
from typing import Iterator, Tuple, Union

import numpy as np
from pydantic import ValidationError

from ..errors import (
    BadMagic,
    DimensionMismatch,
    EntryOutOfRange,
    InvariantViolation,
    IOFailure,
    TruncatedFile,
    VersionMismatch,
)
from ..models.image import Image
from ..models.lutmap import LutMap, SubpixelCoord
from ..schemas.calibration import MappingParams
from ..schemas.quilt import QuiltLayout

logger = logging.getLogger(__name__)

MAP_MAGIC = b"MRPH"
MAP_VERSION = 1
# magic, version u16, native w/h u32, cols/rows u16, view w/h u32; little-endian
MAP_HEADER = struct.Struct("<4sHIIHHII")
ROW_BLOCK = 64


class LenmapService:
    """
    Subpixel -> view mapping of a slanted lenticular panel, and the lookup
    table that replaces evaluating it per frame.

    For native subpixel (x, y, c) on a W x H panel, with horizontal subpixel
    index i = 3x + c and one lens period L = 3 * W / pitch_px subpixels:

        phase = fract((i - offset * L - y * 3 * tan_alpha * W / H) / L)
        view  = min(floor(phase * N), N - 1)

    x and y are mirrored first when flip_x / flip_y are set, c is reversed
    when flip_subpixel is set and the view is reversed for inverted_views.
    The table stores, per subpixel, the flat quilt sample index to gather.
    """

    @staticmethod
    def _row_terms(params: MappingParams) -> Tuple[float, float, float]:
        width, height = params.native_width, params.native_height
        lens = params.lens_period_subpixels
        offset = params.offset * lens
        row_factor = 3.0 * params.tan_alpha * width / height
        return lens, offset, row_factor

    @staticmethod
    def view_index(sub: SubpixelCoord, params: MappingParams) -> int:
        x, y, c = sub
        if params.flip_x:
            x = params.native_width - 1 - x
        if params.flip_y:
            y = params.native_height - 1 - y
        if params.flip_subpixel:
            c = 2 - c
        lens, offset, row_factor = LenmapService._row_terms(params)
        t = (float(3 * x + c) - offset - float(y) * row_factor) / lens
        phase = t - math.floor(t)
        n = params.total_views
        view = min(int(math.floor(phase * n)), n - 1)
        if params.inverted_views:
            view = n - 1 - view
        return view

    @staticmethod
    def view_rows(params: MappingParams, y0: int, y1: int) -> np.ndarray:
        """View numbers for native rows [y0, y1) as an (rows, 3W) int64 array."""
        width, height = params.native_width, params.native_height
        k = np.arange(3 * width, dtype=np.int64)
        x, c = k // 3, k % 3
        if params.flip_x:
            x = width - 1 - x
        if params.flip_subpixel:
            c = 2 - c
        i = (3 * x + c).astype(np.float64)

        y = np.arange(y0, y1, dtype=np.int64)
        if params.flip_y:
            y = height - 1 - y
        y = y.astype(np.float64)

        lens, offset, row_factor = LenmapService._row_terms(params)
        t = (i[None, :] - offset - y[:, None] * row_factor) / lens
        phase = t - np.floor(t)
        n = params.total_views
        views = np.minimum(np.floor(phase * n).astype(np.int64), n - 1)
        if params.inverted_views:
            views = n - 1 - views
        return views

    @staticmethod
    def _entry_blocks(
        params: MappingParams, layout: QuiltLayout, native_width: int, native_height: int
    ) -> Iterator[Tuple[int, int, np.ndarray]]:
        params = params.for_native(native_width, native_height)
        if params.total_views != layout.total_views:
            raise DimensionMismatch(
                f"Mapping expects {params.total_views} views, layout {layout.mask()} has {layout.total_views}"
            )

        n = layout.total_views
        view = np.arange(n, dtype=np.int64)
        tile_x = (view % layout.cols) * layout.view_width
        tile_y = (layout.rows - 1 - view // layout.cols) * layout.view_height

        k = np.arange(3 * native_width, dtype=np.int64)
        channel = k % 3
        # Nearest-lower sample of the view at the native position
        px = (k // 3) * layout.view_width // native_width
        quilt_width = layout.quilt_width

        for y0 in range(0, native_height, ROW_BLOCK):
            y1 = min(y0 + ROW_BLOCK, native_height)
            views = LenmapService.view_rows(params, y0, y1)
            py = np.arange(y0, y1, dtype=np.int64) * layout.view_height // native_height
            rows = tile_y[views] + py[:, None]
            cols = tile_x[views] + px[None, :]
            yield y0, y1, (rows * quilt_width + cols) * 3 + channel[None, :]

    @staticmethod
    def build_lut(params: MappingParams, layout: QuiltLayout, native_width: int, native_height: int) -> LutMap:
        if native_width < 1 or native_height < 1:
            raise InvariantViolation("native", f"dimensions must be >= 1, got {native_width}x{native_height}")
        if layout.sample_count > 2 ** 32:
            raise InvariantViolation("layout", "quilt too large for 32-bit sample indices")

        entries = np.empty(native_width * native_height * 3, dtype=np.uint32)
        stride = native_width * 3
        for y0, y1, block in LenmapService._entry_blocks(params, layout, native_width, native_height):
            entries[y0 * stride:y1 * stride] = block.reshape(-1)

        logger.info(
            "Built LUT %dx%d for %s quilt of %dx%d views (%d entries)",
            native_width, native_height, layout.mask(), layout.view_width, layout.view_height, entries.size,
        )
        return LutMap(native_width=native_width, native_height=native_height, layout=layout, entries=entries)

    @staticmethod
    def check_quilt(quilt: Image, layout: QuiltLayout) -> None:
        if quilt.size != (layout.quilt_width, layout.quilt_height):
            raise DimensionMismatch(
                f"Quilt is {quilt.width}x{quilt.height}, map expects "
                f"{layout.quilt_width}x{layout.quilt_height} ({layout.mask()} of "
                f"{layout.view_width}x{layout.view_height} views)"
            )

    @staticmethod
    def apply_lut(lut: LutMap, quilt: Image) -> Image:
        """Gather the native image out of the quilt; integer indexing only."""
        LenmapService.check_quilt(quilt, lut.layout)
        native = np.take(quilt.data, lut.entries)
        return Image(pixels=native.reshape(lut.native_height, lut.native_width, 3))

    @staticmethod
    def render_native_direct(
        quilt: Image, params: MappingParams, layout: QuiltLayout, native_width: int, native_height: int
    ) -> Image:
        """Evaluate the mapping for every subpixel at run time, no stored table."""
        LenmapService.check_quilt(quilt, layout)
        native = np.empty((native_height, native_width * 3), dtype=np.uint8)
        samples = quilt.data
        for y0, y1, block in LenmapService._entry_blocks(params, layout, native_width, native_height):
            native[y0:y1] = samples[block]
        return Image(pixels=native.reshape(native_height, native_width, 3))

    @staticmethod
    def default_layout() -> QuiltLayout:
        """Default map layout: 8 columns x 4 rows of 256-row x 512-column views."""
        return QuiltLayout(cols=8, rows=4, view_width=512, view_height=256)

    @staticmethod
    def describe_map(lut: LutMap) -> dict:
        return {
            "native_width": lut.native_width,
            "native_height": lut.native_height,
            "quilt": lut.layout.mask(),
            "resolution": lut.layout.resolution(),
            "total_views": lut.layout.total_views,
            "entries": int(lut.entries.size),
        }

    @staticmethod
    def save_map(lut: LutMap, path: Union[str, Path]) -> None:
        layout = lut.layout
        header = MAP_HEADER.pack(
            MAP_MAGIC, MAP_VERSION, lut.native_width, lut.native_height,
            layout.cols, layout.rows, layout.view_width, layout.view_height,
        )
        try:
            with open(path, "wb") as fh:
                fh.write(header)
                fh.write(lut.entries.astype("<u4", copy=False).tobytes())
        except OSError as e:
            raise IOFailure(f"Cannot write map {path}: {e}") from e

    @staticmethod
    def load_map(path: Union[str, Path]) -> LutMap:
        try:
            payload = Path(path).read_bytes()
        except OSError as e:
            raise IOFailure(f"Cannot read map {path}: {e}") from e

        if len(payload) < MAP_HEADER.size:
            if payload[:4] and not MAP_MAGIC.startswith(payload[:4]):
                raise BadMagic(f"{path}: not a map file")
            raise TruncatedFile(f"{path}: header is {len(payload)} bytes, need {MAP_HEADER.size}")
        magic, version, width, height, cols, rows, view_width, view_height = MAP_HEADER.unpack_from(payload)
        if magic != MAP_MAGIC:
            raise BadMagic(f"{path}: bad magic {magic!r}")
        if version != MAP_VERSION:
            raise VersionMismatch(f"{path}: map format version {version}, expected {MAP_VERSION}")

        try:
            layout = QuiltLayout(cols=cols, rows=rows, view_width=view_width, view_height=view_height)
        except ValidationError as e:
            raise InvariantViolation("layout", str(e)) from e
        if width < 1 or height < 1:
            raise InvariantViolation("native", f"{width}x{height}")

        expected = width * height * 3 * 4
        body = payload[MAP_HEADER.size:]
        if len(body) != expected:
            raise TruncatedFile(f"{path}: {len(body)} entry bytes, expected {expected}")

        entries = np.frombuffer(body, dtype="<u4").astype(np.uint32)
        if entries.size and int(entries.max()) >= layout.sample_count:
            raise EntryOutOfRange(f"{path}: entry {int(entries.max())} beyond {layout.sample_count} quilt samples")
        lut = LutMap(native_width=width, native_height=height, layout=layout, entries=entries)
        if not lut.channels_preserved():
            raise EntryOutOfRange(f"{path}: entries cross colour channels")
        return lut
