"""Shared fixtures for the monocc test suite."""

import numpy as np
import pytest

from monocc.field.analytic import AnalyticField, Primitive, Shape
from monocc.geometry.camera import CameraIntrinsics, Pixel
from monocc.geometry.pose import Pose
from monocc.io.jsonio import write_json
from monocc.log import set_verbose
from monocc.sampler.instances import InstanceMeta

WALL_DEPTH = 10.0


@pytest.fixture(autouse=True)
def quiet():
    """Keep tagged console logging out of test output."""
    set_verbose(False)
    yield
    set_verbose(True)


@pytest.fixture
def K() -> CameraIntrinsics:
    """Small camera: 64 x 48 pixels, principal point at the image centre."""
    return CameraIntrinsics(fx=100.0, fy=100.0, cx=31.5, cy=23.5, width=64, height=48)


@pytest.fixture
def wall_field() -> AnalyticField:
    """Opaque fronto-parallel wall whose front face sits at z = 10 m."""
    wall = Primitive(
        Shape.BOX,
        color=(0.8, 0.4, 0.2),
        center=(0.0, 0.0, WALL_DEPTH + 0.5),
        half_extents=(50.0, 50.0, 0.5),
    )
    return AnalyticField((wall,), background=np.zeros(3))


@pytest.fixture
def identity_pose() -> Pose:
    return Pose.identity()


@pytest.fixture
def kitti_instances() -> list[InstanceMeta]:
    """Instance layout over a 640 x 192 image: two crucial objects, two large areas."""
    return [
        InstanceMeta("car", Pixel(200.0, 120.0), (20.0, 40.0), 2400.0),
        InstanceMeta("pedestrian", Pixel(450.0, 100.0), (30.0, 10.0), 500.0),
        InstanceMeta("road", Pixel(320.0, 170.0), (22.0, 320.0), 20000.0),
        InstanceMeta("building", Pixel(320.0, 50.0), (50.0, 320.0), 30000.0),
    ]


def _wall_descriptor(**overrides) -> dict:
    """Scene descriptor of the wall fixture with one auxiliary view."""
    data = {
        "intrinsics": {"fx": 100, "fy": 100, "cx": 31.5, "cy": 23.5, "width": 64, "height": 48},
        "camera_pose": {"translation": [0, 0, 0]},
        "aux_poses": {"next": {"translation": [0.1, 0, 0]}},
        "background": [0, 0, 0],
        "primitives": [
            {
                "shape": "box",
                "center": [0, 0, WALL_DEPTH + 0.5],
                "half_extents": [50, 50, 0.5],
                "color": [0.8, 0.4, 0.2],
            },
            {
                "shape": "box",
                "center": [0, 0, 6.5],
                "half_extents": [0.6, 0.4, 0.5],
                "color": [0.1, 0.3, 0.9],
                "category": "car",
            },
        ],
        "pseudo_depth": {"kind": "scaled", "scale": 2.0},
    }
    data.update(overrides)
    return data


@pytest.fixture
def wall_descriptor():
    """Factory for wall descriptors; keyword arguments replace top-level keys."""
    return _wall_descriptor


@pytest.fixture
def wall_descriptor_path(tmp_path):
    return write_json(tmp_path / "wall.json", _wall_descriptor())
