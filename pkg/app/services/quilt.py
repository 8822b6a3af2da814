import re
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import CountMismatch, DimensionMismatch, LayoutParseError
from ..models.image import Image
from ..schemas.quilt import QuiltLayout

PAIR_PATTERN = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


class QuiltService:
    """
    Quilt geometry and (dis)assembly.

    Grid order: view k goes to grid column k mod cols, grid row counted
    from the bottom (rows - 1 - k // cols). View 0 (leftmost camera) is the
    bottom-left tile, the last view is top-right.

    Mask strings "AxB" mean A columns by B rows ("9x5" is a 45-view quilt,
    9 wide and 5 high). Resolution strings are ROWSxCOLS ("240x320" is a
    view 240 pixels high and 320 wide).
    """

    @staticmethod
    def parse_pair(text: str, what: str = "value") -> Tuple[int, int]:
        match = PAIR_PATTERN.match(text or "")
        if not match:
            raise LayoutParseError(f"Invalid {what} '{text}', expected INTxINT")
        first, second = int(match.group(1)), int(match.group(2))
        if first < 1 or second < 1:
            raise LayoutParseError(f"Invalid {what} '{text}', both numbers must be >= 1")
        return first, second

    @staticmethod
    def parse_layout(text: str) -> Tuple[int, int]:
        """Parse a quilt mask; returns the two integers in the order written."""
        return QuiltService.parse_pair(text, "quilt mask")

    @staticmethod
    def parse_resolution(text: str) -> Tuple[int, int]:
        """Parse ROWSxCOLS; returns (rows, cols)."""
        return QuiltService.parse_pair(text, "resolution")

    @staticmethod
    def layout_from_flags(mask: str, resolution: str) -> QuiltLayout:
        cols, rows = QuiltService.parse_layout(mask)
        view_height, view_width = QuiltService.parse_resolution(resolution)
        return QuiltLayout(cols=cols, rows=rows, view_width=view_width, view_height=view_height)

    @staticmethod
    def assemble_quilt(views: Sequence[Image], layout: QuiltLayout) -> Image:
        if len(views) != layout.total_views:
            raise CountMismatch(layout.total_views, len(views))

        quilt = np.empty((layout.quilt_height, layout.quilt_width, 3), dtype=np.uint8)
        for k, view in enumerate(views):
            if view.size != (layout.view_width, layout.view_height):
                raise DimensionMismatch(
                    f"View {k} is {view.width}x{view.height}, "
                    f"layout expects {layout.view_width}x{layout.view_height}",
                    index=k,
                )
            x0, y0 = layout.tile_origin(k)
            quilt[y0:y0 + layout.view_height, x0:x0 + layout.view_width] = view.pixels
        return Image(pixels=quilt)

    @staticmethod
    def split_quilt(quilt: Image, layout: QuiltLayout) -> List[Image]:
        if quilt.size != (layout.quilt_width, layout.quilt_height):
            raise DimensionMismatch(
                f"Quilt is {quilt.width}x{quilt.height}, layout {layout.mask()} of "
                f"{layout.view_width}x{layout.view_height} views needs "
                f"{layout.quilt_width}x{layout.quilt_height}"
            )
        views = []
        for k in range(layout.total_views):
            x0, y0 = layout.tile_origin(k)
            views.append(Image.from_array(quilt.pixels[y0:y0 + layout.view_height, x0:x0 + layout.view_width]))
        return views
