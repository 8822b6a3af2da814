from pydantic import BaseModel, Field


class QuiltLayout(BaseModel):
    """Grid geometry of a quilt: `cols` x `rows` views of view_width x view_height."""

    cols: int = Field(..., ge=1, description="Views per grid row")
    rows: int = Field(..., ge=1, description="Grid rows")
    view_width: int = Field(..., ge=1, description="Width of a single view in pixels")
    view_height: int = Field(..., ge=1, description="Height of a single view in pixels")

    class Config:
        frozen = True

    @property
    def total_views(self) -> int:
        return self.cols * self.rows

    @property
    def quilt_width(self) -> int:
        return self.cols * self.view_width

    @property
    def quilt_height(self) -> int:
        return self.rows * self.view_height

    @property
    def sample_count(self) -> int:
        return self.quilt_width * self.quilt_height * 3

    def tile_origin(self, view: int) -> tuple[int, int]:
        """Top-left pixel of view `view` inside the quilt.

        Views fill the grid row by row starting at the bottom-left tile,
        so view 0 sits bottom-left and the last view top-right.
        """
        col = view % self.cols
        row = self.rows - 1 - view // self.cols
        return col * self.view_width, row * self.view_height

    def mask(self) -> str:
        return f"{self.cols}x{self.rows}"

    def resolution(self) -> str:
        return f"{self.view_height}x{self.view_width}"
