import numpy as np
import pytest
from PIL import Image as PILImage

from app.errors import DecodeFailure, InputFileNotFound, IOFailure, OddWidthError, UnsupportedBitDepth
from app.models.image import Image, PixelCoord
from app.services.imaging import ImagingService, resize_plane


def test_png_round_trip(tmp_path, random_image):
    image = random_image(17, 9, seed=3)
    path = tmp_path / "img.png"
    ImagingService.save_png(image, path)
    assert ImagingService.load_png(path) == image


def test_bytes_round_trip(random_image):
    image = random_image(8, 5, seed=1)
    assert ImagingService.decode_png_bytes(ImagingService.encode_png_bytes(image)) == image


def test_load_missing_file(tmp_path):
    with pytest.raises(InputFileNotFound) as exc:
        ImagingService.load_png(tmp_path / "absent.png")
    assert exc.value.code == "file-not-found"


def test_load_rejects_non_png(tmp_path):
    path = tmp_path / "fake.png"
    path.write_bytes(b"this is not an image at all, just some text")
    with pytest.raises(DecodeFailure):
        ImagingService.load_png(path)


def test_load_rejects_16_bit(tmp_path):
    path = tmp_path / "deep.png"
    PILImage.fromarray(np.full((4, 4), 1000, dtype=np.uint16), mode="I;16").save(path)
    with pytest.raises(UnsupportedBitDepth) as exc:
        ImagingService.load_png(path)
    assert exc.value.bit_depth == 16


def test_gray_expands_and_alpha_drops(tmp_path):
    gray = tmp_path / "gray.png"
    PILImage.fromarray(np.full((3, 5), 77, dtype=np.uint8), mode="L").save(gray)
    image = ImagingService.load_png(gray)
    assert image.size == (5, 3)
    assert image.pixel(PixelCoord(2, 1)) == (77, 77, 77)

    rgba = tmp_path / "rgba.png"
    pixels = np.zeros((2, 2, 4), dtype=np.uint8)
    pixels[...] = (10, 20, 30, 0)
    PILImage.fromarray(pixels, mode="RGBA").save(rgba)
    assert ImagingService.load_png(rgba).pixel(PixelCoord(0, 0)) == (10, 20, 30)


def test_save_into_missing_directory(tmp_path):
    with pytest.raises(IOFailure):
        ImagingService.save_png(Image.filled(2, 2, (1, 2, 3)), tmp_path / "nope" / "out.png")


def test_image_is_immutable():
    image = Image.filled(3, 2, (9, 9, 9))
    with pytest.raises(ValueError):
        image.pixels[0, 0, 0] = 1


def test_split_side_by_side(random_image):
    frame = random_image(10, 4)
    left, right = ImagingService.split_side_by_side(frame)
    assert left.size == right.size == (5, 4)
    assert np.array_equal(left.pixels, frame.pixels[:, :5])
    assert ImagingService.concat_horizontal(left, right) == frame


def test_split_odd_width():
    with pytest.raises(OddWidthError) as exc:
        ImagingService.split_side_by_side(Image.filled(7, 2, (0, 0, 0)))
    assert exc.value.width == 7


def test_resize_same_size_is_identity(random_image):
    image = random_image(6, 4)
    assert ImagingService.resize(image, 6, 4) is image


def test_resize_halves_with_pixel_centres():
    pixels = np.zeros((2, 4, 3), dtype=np.uint8)
    pixels[:, :, 0] = [0, 10, 20, 30]
    half = ImagingService.resize(Image(pixels=pixels), 2, 1)
    assert half.pixels[0, :, 0].tolist() == [5, 25]


def test_resize_plane_upscales_with_clamped_edges():
    plane = np.array([[0.0, 100.0], [40.0, 40.0]])
    wide = resize_plane(plane, 4, 2)
    assert wide[0].tolist() == pytest.approx([0.0, 25.0, 75.0, 100.0])
    assert wide[1].tolist() == pytest.approx([40.0] * 4)
    tall = resize_plane(plane, 2, 4)
    assert tall[:, 0].tolist() == pytest.approx([0.0, 10.0, 30.0, 40.0])


def test_resize_keeps_constant_images_constant():
    image = Image.filled(5, 3, (12, 200, 7))
    assert ImagingService.resize(image, 11, 8) == Image.filled(11, 8, (12, 200, 7))


def test_to_gray_weights():
    pixels = np.zeros((1, 3, 3), dtype=np.uint8)
    pixels[0, 0] = (255, 0, 0)
    pixels[0, 1] = (0, 255, 0)
    pixels[0, 2] = (0, 0, 255)
    assert ImagingService.to_gray(Image(pixels=pixels)).tolist() == [[76.0, 150.0, 29.0]]
