import math

import numpy as np
import pytest

from app.errors import BadMagic, DimensionMismatch, EntryOutOfRange, TruncatedFile, VersionMismatch
from app.models.image import Image
from app.models.lutmap import SubpixelCoord
from app.schemas.calibration import MappingParams
from app.schemas.quilt import QuiltLayout
from app.services.calibration import CalibrationService
from app.services.lenmap import MAP_HEADER, MAP_MAGIC, LenmapService

SMALL_LAYOUT = QuiltLayout(cols=4, rows=2, view_width=32, view_height=16)


def small_params(**overrides) -> MappingParams:
    values = dict(
        pitch_px=5.3,
        tan_alpha=-0.113,
        offset=-0.0978,
        total_views=8,
        native_width=64,
        native_height=40,
    )
    values.update(overrides)
    return MappingParams(**values)


def oracle_view(x: int, y: int, c: int, p: MappingParams) -> int:
    """Straight per-subpixel evaluation of the lenticular mapping."""
    w, h, n = p.native_width, p.native_height, p.total_views
    if p.flip_x:
        x = w - 1 - x
    if p.flip_y:
        y = h - 1 - y
    if p.flip_subpixel:
        c = 2 - c
    lens = 3.0 * w / p.pitch_px
    t = (float(3 * x + c) - p.offset * lens - float(y) * (3.0 * p.tan_alpha * w / h)) / lens
    view = min(int(math.floor((t - math.floor(t)) * n)), n - 1)
    return n - 1 - view if p.inverted_views else view


def oracle_native(quilt: Image, p: MappingParams, layout: QuiltLayout) -> np.ndarray:
    w, h = p.native_width, p.native_height
    out = np.empty((h, w, 3), dtype=np.uint8)
    for y in range(h):
        for x in range(w):
            for c in range(3):
                v = oracle_view(x, y, c, p)
                qx = (v % layout.cols) * layout.view_width + x * layout.view_width // w
                qy = (layout.rows - 1 - v // layout.cols) * layout.view_height + y * layout.view_height // h
                out[y, x, c] = quilt.pixels[qy, qx, c]
    return out


def random_quilt(layout: QuiltLayout, seed: int = 0) -> Image:
    rng = np.random.default_rng(seed)
    return Image(pixels=rng.integers(0, 256, (layout.quilt_height, layout.quilt_width, 3), dtype=np.uint8))


@pytest.mark.parametrize(
    "flags",
    [{}, {"flip_x": True}, {"flip_y": True}, {"flip_subpixel": True}, {"inverted_views": True}],
)
def test_lut_matches_direct_evaluation(flags):
    params = small_params(**flags)
    quilt = random_quilt(SMALL_LAYOUT, seed=1)
    lut = LenmapService.build_lut(params, SMALL_LAYOUT, 64, 40)

    native = LenmapService.apply_lut(lut, quilt)
    assert native.size == (64, 40)
    assert np.array_equal(native.pixels, oracle_native(quilt, params, SMALL_LAYOUT))
    assert LenmapService.render_native_direct(quilt, params, SMALL_LAYOUT, 64, 40) == native


def test_shipped_calibration_golden_views(calibration_text):
    cal = CalibrationService.parse_calibration(calibration_text)
    layout = QuiltLayout(cols=9, rows=5, view_width=320, view_height=240)
    params = CalibrationService.derive_mapping_params(cal, layout)
    # phase at the origin is -center = 0.0978..., view 4 of 45 before inversion
    assert LenmapService.view_index(SubpixelCoord(0, 0, 0), params) == 40
    # three subpixels on: 3 / 21.668 + 0.0978 = 0.2363, view 10 before inversion
    assert LenmapService.view_index(SubpixelCoord(1, 0, 0), params) == 34
    assert oracle_view(0, 0, 0, params) == 40


def test_lut_entries_point_at_the_selected_view():
    params = small_params()
    lut = LenmapService.build_lut(params, SMALL_LAYOUT, 64, 40)
    for x, y, c in [(0, 0, 0), (63, 0, 2), (17, 23, 1), (0, 39, 2), (40, 11, 0)]:
        v = oracle_view(x, y, c, params)
        qx = (v % 4) * 32 + x * 32 // 64
        qy = (1 - v // 4) * 16 + y * 16 // 40
        assert lut.entry(SubpixelCoord(x, y, c)) == (qy * 128 + qx) * 3 + c


def test_scalar_and_row_views_agree():
    params = small_params()
    rows = LenmapService.view_rows(params, 0, 40)
    for y in range(40):
        for k in range(3 * 64):
            assert rows[y, k] == LenmapService.view_index(SubpixelCoord(k // 3, y, k % 3), params)


def test_lut_preserves_channels_and_range():
    lut = LenmapService.build_lut(small_params(), SMALL_LAYOUT, 64, 40)
    assert lut.channels_preserved()
    assert int(lut.entries.max()) < SMALL_LAYOUT.sample_count


def test_constant_quilt_gives_constant_native():
    lut = LenmapService.build_lut(small_params(), SMALL_LAYOUT, 64, 40)
    quilt = Image.filled(SMALL_LAYOUT.quilt_width, SMALL_LAYOUT.quilt_height, (3, 141, 59))
    assert LenmapService.apply_lut(lut, quilt) == Image.filled(64, 40, (3, 141, 59))


def test_phase_repeats_every_lens_period():
    # 64 px wide and 8 lenses across: one lens spans 24 subpixels
    params = small_params(pitch_px=8.0, tan_alpha=0.0, offset=0.0)
    views = LenmapService.view_rows(params, 0, 40)
    assert np.array_equal(views[:, :-24], views[:, 24:])
    # no slant: every row is the same
    assert np.array_equal(views, np.broadcast_to(views[0], views.shape))
    assert sorted(set(views[0].tolist())) == list(range(8))


def test_flip_x_mirrors_columns():
    plain = small_params()
    flipped = small_params(flip_x=True)
    for y in (0, 17, 39):
        for x in range(64):
            for c in range(3):
                assert LenmapService.view_index(SubpixelCoord(x, y, c), flipped) == LenmapService.view_index(
                    SubpixelCoord(63 - x, y, c), plain
                )


def test_inverted_views_reverse_numbering():
    plain = LenmapService.view_rows(small_params(), 0, 40)
    inverted = LenmapService.view_rows(small_params(inverted_views=True), 0, 40)
    assert np.array_equal(inverted, 7 - plain)


def test_view_count_must_match_layout():
    with pytest.raises(DimensionMismatch):
        LenmapService.build_lut(small_params(total_views=9), SMALL_LAYOUT, 64, 40)


def test_apply_rejects_wrong_quilt():
    lut = LenmapService.build_lut(small_params(), SMALL_LAYOUT, 64, 40)
    with pytest.raises(DimensionMismatch):
        LenmapService.apply_lut(lut, Image.filled(64, 64, (0, 0, 0)))


def test_map_round_trip(tmp_path):
    lut = LenmapService.build_lut(small_params(), SMALL_LAYOUT, 64, 40)
    path = tmp_path / "small.map"
    LenmapService.save_map(lut, path)

    payload = path.read_bytes()
    assert payload[:4] == MAP_MAGIC
    assert len(payload) == MAP_HEADER.size + 64 * 40 * 3 * 4
    assert LenmapService.load_map(path) == lut


def test_default_layout_map_round_trip(tmp_path):
    layout = LenmapService.default_layout()
    assert (layout.cols, layout.rows, layout.view_width, layout.view_height) == (8, 4, 512, 256)
    params = small_params(total_views=32, native_width=48, native_height=30)
    lut = LenmapService.build_lut(params, layout, 48, 30)
    path = tmp_path / "default.map"
    LenmapService.save_map(lut, path)
    loaded = LenmapService.load_map(path)
    assert loaded == lut
    assert LenmapService.describe_map(loaded) == {
        "native_width": 48,
        "native_height": 30,
        "quilt": "8x4",
        "resolution": "256x512",
        "total_views": 32,
        "entries": 48 * 30 * 3,
    }


def write_map(path, header_fields, entries):
    path.write_bytes(MAP_HEADER.pack(*header_fields) + np.asarray(entries, dtype="<u4").tobytes())


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.map"
    write_map(path, (b"PNG!", 1, 1, 1, 1, 1, 1, 1), [0, 1, 2])
    with pytest.raises(BadMagic):
        LenmapService.load_map(path)


def test_load_rejects_other_version(tmp_path):
    path = tmp_path / "v2.map"
    write_map(path, (MAP_MAGIC, 2, 1, 1, 1, 1, 1, 1), [0, 1, 2])
    with pytest.raises(VersionMismatch):
        LenmapService.load_map(path)


def test_load_rejects_truncated(tmp_path):
    path = tmp_path / "short.map"
    write_map(path, (MAP_MAGIC, 1, 2, 1, 1, 1, 2, 1), [0, 1, 2])
    with pytest.raises(TruncatedFile):
        LenmapService.load_map(path)
    path.write_bytes(MAP_MAGIC + b"\x01")
    with pytest.raises(TruncatedFile):
        LenmapService.load_map(path)


def test_load_rejects_out_of_range_entries(tmp_path):
    path = tmp_path / "range.map"
    write_map(path, (MAP_MAGIC, 1, 1, 1, 1, 1, 1, 1), [0, 1, 3])
    with pytest.raises(EntryOutOfRange):
        LenmapService.load_map(path)


def test_load_rejects_channel_crossing(tmp_path):
    path = tmp_path / "cross.map"
    # 1x1 native over a 2x1 quilt: the red subpixel reads a green sample
    write_map(path, (MAP_MAGIC, 1, 1, 1, 2, 1, 1, 1), [1, 1, 2])
    with pytest.raises(EntryOutOfRange):
        LenmapService.load_map(path)


@pytest.mark.slow
@pytest.mark.parametrize("cols, rows", [(1, 1), (4, 2), (9, 5)])
def test_full_panel_views_in_range(calibration_text, cols, rows):
    cal = CalibrationService.parse_calibration(calibration_text)
    layout = QuiltLayout(cols=cols, rows=rows, view_width=320, view_height=240)
    params = CalibrationService.derive_mapping_params(cal, layout)
    for y0 in range(0, 1600, 200):
        views = LenmapService.view_rows(params, y0, y0 + 200)
        assert views.shape == (200, 3 * 2560)
        assert int(views.min()) >= 0
        assert int(views.max()) < layout.total_views


@pytest.mark.slow
def test_full_panel_lut_matches_direct_evaluation(calibration_text):
    cal = CalibrationService.parse_calibration(calibration_text)
    layout = QuiltLayout(cols=9, rows=5, view_width=320, view_height=240)
    params = CalibrationService.derive_mapping_params(cal, layout)
    quilt = random_quilt(layout, seed=5)

    lut = LenmapService.build_lut(params, layout, 2560, 1600)
    native = LenmapService.apply_lut(lut, quilt)
    assert native.size == (2560, 1600)
    assert LenmapService.render_native_direct(quilt, params, layout, 2560, 1600) == native

    rng = np.random.default_rng(11)
    for x, y, c in zip(rng.integers(0, 2560, 2000), rng.integers(0, 1600, 2000), rng.integers(0, 3, 2000)):
        x, y, c = int(x), int(y), int(c)
        v = oracle_view(x, y, c, params)
        qx = (v % 9) * 320 + x * 320 // 2560
        qy = (4 - v // 9) * 240 + y * 240 // 1600
        assert native.pixels[y, x, c] == quilt.pixels[qy, qx, c]
