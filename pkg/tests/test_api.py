import numpy as np
import pytest
from fastapi.testclient import TestClient

from app.main import app
from app.models.image import Image
from app.services.imaging import ImagingService
from app.store import MapStore, get_store

PREFIX = "/api/v1"


@pytest.fixture
def client(tmp_path):
    app.dependency_overrides[get_store] = lambda: MapStore(tmp_path / "maps")
    yield TestClient(app)
    app.dependency_overrides.clear()


@pytest.fixture
def created(client, small_calibration):
    response = client.post(
        f"{PREFIX}/maps",
        json={"name": "panel-4x2", "calibration": small_calibration, "quilt": "4x2", "resolution": "16x32"},
    )
    assert response.status_code == 201
    return response.json()


def test_health(client):
    assert client.get("/").json()["status"] == "healthy"
    assert client.get("/health").json()["status"] == "healthy"


def test_create_map(created):
    assert created == {
        "name": "panel-4x2",
        "native_width": 64,
        "native_height": 40,
        "quilt": "4x2",
        "resolution": "16x32",
        "total_views": 8,
        "entries": 64 * 40 * 3,
    }


def test_duplicate_map_name(client, created, small_calibration):
    response = client.post(f"{PREFIX}/maps", json={"name": "panel-4x2", "calibration": small_calibration})
    assert response.status_code == 409


def test_invalid_calibration(client, small_calibration):
    del small_calibration["pitch"]
    response = client.post(f"{PREFIX}/maps", json={"name": "broken", "calibration": small_calibration})
    assert response.status_code == 400
    assert "pitch" in response.json()["detail"]


def test_invalid_map_name(client, small_calibration):
    response = client.post(f"{PREFIX}/maps", json={"name": "no spaces/here", "calibration": small_calibration})
    assert response.status_code == 422


def test_list_and_get(client, created):
    assert [item["name"] for item in client.get(f"{PREFIX}/maps").json()] == ["panel-4x2"]
    assert client.get(f"{PREFIX}/maps/panel-4x2").json() == created
    assert client.get(f"{PREFIX}/maps/missing").status_code == 404


def test_apply_map(client, created):
    quilt = Image.filled(128, 32, (10, 20, 30))
    response = client.post(
        f"{PREFIX}/maps/panel-4x2/apply",
        content=ImagingService.encode_png_bytes(quilt),
        headers={"Content-Type": "image/png"},
    )
    assert response.status_code == 200
    assert response.headers["content-type"] == "image/png"
    assert ImagingService.decode_png_bytes(response.content) == Image.filled(64, 40, (10, 20, 30))


def test_apply_rejects_wrong_quilt(client, created):
    quilt = Image(pixels=np.zeros((32, 100, 3), dtype=np.uint8))
    response = client.post(
        f"{PREFIX}/maps/panel-4x2/apply",
        content=ImagingService.encode_png_bytes(quilt),
        headers={"Content-Type": "image/png"},
    )
    assert response.status_code == 400


def test_apply_unknown_map(client):
    response = client.post(
        f"{PREFIX}/maps/nothing/apply",
        content=ImagingService.encode_png_bytes(Image.filled(4, 4, (0, 0, 0))),
        headers={"Content-Type": "image/png"},
    )
    assert response.status_code == 404


def test_apply_rejects_non_png_body(client, created):
    response = client.post(
        f"{PREFIX}/maps/panel-4x2/apply",
        content=b"definitely not a png",
        headers={"Content-Type": "image/png"},
    )
    assert response.status_code == 400


def test_delete_map(client, created):
    assert client.delete(f"{PREFIX}/maps/panel-4x2").status_code == 204
    assert client.get(f"{PREFIX}/maps/panel-4x2").status_code == 404
    assert client.delete(f"{PREFIX}/maps/panel-4x2").status_code == 404


def test_mapping_params(client, calibration_builder):
    response = client.post(
        f"{PREFIX}/calibration/mapping-params",
        json={"calibration": calibration_builder(), "quilt": "9x5"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["total_views"] == 45
    assert body["inverted_views"] is True
    assert (body["native_width"], body["native_height"]) == (2560, 1600)
    assert 354.0 < body["pitch_px"] < 355.0


def test_mapping_params_bad_mask(client, calibration_builder):
    response = client.post(
        f"{PREFIX}/calibration/mapping-params",
        json={"calibration": calibration_builder(), "quilt": "nine by five"},
    )
    assert response.status_code == 400
