import logging
from typing import List

import numpy as np
from scipy.ndimage import convolve, gaussian_filter, map_coordinates, median_filter

from ..errors import DegenerateImage, DimensionMismatch, InvariantViolation, TOutOfRange
from ..models.correspondence import CorrespondenceField, FieldMode
from ..models.image import Image
from ..schemas.morph import MorphMethod, MorphParams
from .imaging import ImagingService, resize_plane, round_to_uint8

logger = logging.getLogger(__name__)

# Horn-Schunck neighbourhood average
HS_KERNEL = np.array([[1 / 12, 1 / 6, 1 / 12],
                      [1 / 6, 0.0, 1 / 6],
                      [1 / 12, 1 / 6, 1 / 12]])
PYRAMID_MIN_SIZE = 16
# Sweeps between re-warping the right image with the current flow
WARP_INTERVAL = 16


def box_sum(values: np.ndarray, radius: int) -> np.ndarray:
    """Exact (2r+1)^2 window sums of an integer plane, edges replicated."""
    padded = np.pad(values, radius, mode="edge")
    integral = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    integral[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    size = 2 * radius + 1
    h, w = values.shape
    return (
        integral[size:size + h, size:size + w]
        - integral[:h, size:size + w]
        - integral[size:size + h, :w]
        + integral[:h, :w]
    )


def search_order(limit: int) -> List[int]:
    """0, 1, -1, 2, -2, ...: ties resolve to the smallest displacement."""
    order = [0]
    for d in range(1, limit + 1):
        order.extend((d, -d))
    return order


def plane_gradient(plane: np.ndarray) -> List[np.ndarray]:
    """Central differences per axis; zero along an axis with a single sample."""
    return [
        np.gradient(plane, axis=axis) if size > 1 else np.zeros_like(plane)
        for axis, size in enumerate(plane.shape)
    ]


def upscale_field(plane: np.ndarray, width: int, height: int, factor: float) -> np.ndarray:
    if plane.shape == (height, width) and factor == 1:
        return plane
    return resize_plane(plane, width, height) * factor


class MorphService:
    """
    Dense correspondence between a stereo pair and intermediate-view synthesis.

    Two interchangeable backends estimate the field: horizontal SAD block
    matching ("disparity") and a pyramidal Horn-Schunck variational flow
    ("deepflow" on the command line). Views are produced by warping both
    endpoints along the field and cross-dissolving them.
    """

    @staticmethod
    def _check_pair(left: Image, right: Image) -> None:
        if left.size != right.size:
            raise DimensionMismatch(
                f"Stereo pair differs in size: {left.width}x{left.height} vs {right.width}x{right.height}"
            )

    @staticmethod
    def _subsampled_gray(image: Image, factor: int) -> np.ndarray:
        gray = ImagingService.to_gray(image)
        if factor == 1:
            return gray
        return np.floor(
            resize_plane(gray, max(1, image.width // factor), max(1, image.height // factor)) + 0.5
        )

    @staticmethod
    def compute_disparity(left: Image, right: Image, params: MorphParams) -> CorrespondenceField:
        MorphService._check_pair(left, right)
        factor = params.subsampling
        radius = params.block_radius
        window = 2 * radius + 1

        gl = MorphService._subsampled_gray(left, factor).astype(np.int64)
        gr = MorphService._subsampled_gray(right, factor).astype(np.int64)
        h, w = gl.shape
        if w < window or h < window:
            raise DegenerateImage(
                f"{w}x{h} matching image is smaller than the {window}x{window} block "
                f"(subsampling {factor}, block radius {radius})"
            )

        limit = min(max(1, params.max_displacement // factor), w - 1)
        columns = np.arange(w)
        best_cost = np.full((h, w), np.iinfo(np.int64).max, dtype=np.int64)
        best = np.zeros((h, w), dtype=np.int64)
        for d in search_order(limit):
            shifted = gr[:, np.clip(columns - d, 0, w - 1)]
            cost = box_sum(np.abs(gl - shifted), radius)
            better = cost < best_cost
            best_cost[better] = cost[better]
            best[better] = d

        dx = upscale_field(best.astype(np.float64), left.width, left.height, float(factor))
        dx = median_filter(dx, size=3, mode="nearest")
        dx = np.clip(dx, -params.max_displacement, params.max_displacement)
        return CorrespondenceField(mode=FieldMode.disparity, dx=dx, dy=np.zeros_like(dx))

    @staticmethod
    def _pyramid(plane: np.ndarray) -> List[np.ndarray]:
        levels = [plane]
        while min(levels[-1].shape) // 2 >= PYRAMID_MIN_SIZE:
            h, w = levels[-1].shape
            levels.append(resize_plane(gaussian_filter(levels[-1], sigma=1.0, mode="nearest"), w // 2, h // 2))
        return levels

    @staticmethod
    def _relax(i1: np.ndarray, i2: np.ndarray, u: np.ndarray, v: np.ndarray, alpha2: float, iterations: int):
        h, w = i1.shape
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        done = 0
        while done < iterations:
            sweeps = min(WARP_INTERVAL, iterations - done)
            warped = map_coordinates(i2, [yy + v, xx + u], order=1, mode="nearest")
            iy, ix = plane_gradient((i1 + warped) * 0.5)
            it = warped - i1
            denom = alpha2 + ix * ix + iy * iy
            u0, v0 = u, v
            for _ in range(sweeps):
                u_avg = convolve(u, HS_KERNEL, mode="nearest")
                v_avg = convolve(v, HS_KERNEL, mode="nearest")
                step = (ix * (u_avg - u0) + iy * (v_avg - v0) + it) / denom
                u = u_avg - ix * step
                v = v_avg - iy * step
            done += sweeps
        return u, v

    @staticmethod
    def compute_flow(left: Image, right: Image, params: MorphParams) -> CorrespondenceField:
        MorphService._check_pair(left, right)
        factor = params.subsampling
        left_levels = MorphService._pyramid(MorphService._subsampled_gray(left, factor))
        right_levels = MorphService._pyramid(MorphService._subsampled_gray(right, factor))
        alpha2 = float(params.smoothing_weight) ** 2

        u = v = None
        for i1, i2 in zip(reversed(left_levels), reversed(right_levels)):
            h, w = i1.shape
            if u is None:
                u = np.zeros((h, w))
                v = np.zeros((h, w))
            else:
                u = upscale_field(u, w, h, w / u.shape[1])
                v = upscale_field(v, w, h, h / v.shape[0])
            u, v = MorphService._relax(i1, i2, u, v, alpha2, params.iterations)

        # u, v map left onto right; the field stores left minus right
        h, w = left.height, left.width
        dx = upscale_field(-u, w, h, w / u.shape[1])
        dy = upscale_field(-v, w, h, h / v.shape[0])
        limit = params.max_displacement
        return CorrespondenceField(
            mode=FieldMode.flow,
            dx=np.clip(dx, -limit, limit),
            dy=np.clip(dy, -limit, limit),
        )

    @staticmethod
    def compute_field(left: Image, right: Image, params: MorphParams) -> CorrespondenceField:
        if params.method == MorphMethod.deepflow:
            return MorphService.compute_flow(left, right, params)
        return MorphService.compute_disparity(left, right, params)

    @staticmethod
    def synthesize_view(left: Image, right: Image, field: CorrespondenceField, t: float) -> Image:
        if not 0.0 <= t <= 1.0:
            raise TOutOfRange(t)
        MorphService._check_pair(left, right)
        if (field.width, field.height) != left.size:
            raise DimensionMismatch(
                f"Field is {field.width}x{field.height}, images are {left.width}x{left.height}"
            )
        if t == 0.0:
            return left
        if t == 1.0:
            return right

        h, w = left.height, left.width
        yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
        lx, ly = xx + t * field.dx, yy + t * field.dy
        rx, ry = xx - (1.0 - t) * field.dx, yy - (1.0 - t) * field.dy
        valid_left = (lx >= 0) & (lx <= w - 1) & (ly >= 0) & (ly <= h - 1)
        valid_right = (rx >= 0) & (rx <= w - 1) & (ry >= 0) & (ry <= h - 1)
        both = valid_left & valid_right
        fallback_left = t <= 0.5

        out = np.empty((h, w, 3), dtype=np.uint8)
        for c in range(3):
            warped_left = map_coordinates(left.pixels[:, :, c].astype(np.float64), [ly, lx], order=1, mode="nearest")
            warped_right = map_coordinates(right.pixels[:, :, c].astype(np.float64), [ry, rx], order=1, mode="nearest")
            blend = (1.0 - t) * warped_left + t * warped_right
            # One-sided where a warp leaves the frame, nearer frame's edge where both do
            edge = warped_left if fallback_left else warped_right
            single = np.where(valid_left, warped_left, np.where(valid_right, warped_right, edge))
            out[:, :, c] = round_to_uint8(np.where(both, blend, single))
        return Image(pixels=out)

    @staticmethod
    def generate_views(left: Image, right: Image, n: int, params: MorphParams) -> List[Image]:
        """n views from left (t=0) to right (t=1); the field is estimated once."""
        if n < 2:
            raise InvariantViolation("n", f"at least 2 views are required, got {n}")
        MorphService._check_pair(left, right)
        field = MorphService.compute_field(left, right, params)
        logger.debug("Field %s: max |d| %.2f px", field.mode.value, field.max_abs())
        return [MorphService.synthesize_view(left, right, field, k / (n - 1)) for k in range(n)]
