"""Pinhole camera model.

Pixel coordinates are (u, v) with u along the width and v along the height;
the origin is the centre of the top-left pixel, so pixel (c, r) covers
[c - 0.5, c + 0.5] x [r - 0.5, r + 0.5].
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from monocc.errors import BehindCameraError, InvalidArgumentError


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics K plus the image size in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise InvalidArgumentError(
                "focal lengths must be positive", fx=self.fx, fy=self.fy
            )
        if self.width < 1 or self.height < 1:
            raise InvalidArgumentError(
                "image size must be positive", width=self.width, height=self.height
            )
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise InvalidArgumentError(
                "principal point must lie inside the image", cx=self.cx, cy=self.cy
            )

    @property
    def matrix(self) -> np.ndarray:
        """The 3x3 intrinsic matrix K."""
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    @property
    def inverse(self) -> np.ndarray:
        """The 3x3 inverse intrinsic matrix K^-1."""
        return np.array(
            [
                [1.0 / self.fx, 0.0, -self.cx / self.fx],
                [0.0, 1.0 / self.fy, -self.cy / self.fy],
                [0.0, 0.0, 1.0],
            ]
        )

    @property
    def shape(self) -> tuple[int, int]:
        """Raster shape (height, width)."""
        return self.height, self.width

    def contains(self, u: float, v: float) -> bool:
        """Whether (u, v) lies within the span of pixel centres."""
        return 0.0 <= u <= self.width - 1 and 0.0 <= v <= self.height - 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "fx": self.fx,
            "fy": self.fy,
            "cx": self.cx,
            "cy": self.cy,
            "width": self.width,
            "height": self.height,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "CameraIntrinsics":
        return cls(
            fx=float(data["fx"]),
            fy=float(data["fy"]),
            cx=float(data["cx"]),
            cy=float(data["cy"]),
            width=int(data["width"]),
            height=int(data["height"]),
        )


@dataclass(frozen=True)
class Pixel:
    """Continuous image coordinates."""

    u: float
    v: float

    def homogeneous(self) -> np.ndarray:
        """The homogeneous pixel (u, v, 1)."""
        return np.array([self.u, self.v, 1.0])

    def is_finite(self) -> bool:
        return math.isfinite(self.u) and math.isfinite(self.v)


def backproject(K: CameraIntrinsics, x: Pixel, depth: float) -> np.ndarray:
    """
    Lift a pixel to the camera-frame point at a given planar depth.

    Args:
        K: Camera intrinsics.
        x: Pixel.
        depth: Planar depth (meters), must be positive.

    Returns:
        The point depth * K^-1 (u, v, 1).

    Raises:
        InvalidArgumentError: On non-positive depth or a non-finite pixel.
    """
    if not depth > 0:
        raise InvalidArgumentError("depth must be positive", depth=depth)
    if not x.is_finite():
        raise InvalidArgumentError("pixel must be finite", u=x.u, v=x.v)
    return np.array(
        [(x.u - K.cx) / K.fx * depth, (x.v - K.cy) / K.fy * depth, float(depth)]
    )


def project(K: CameraIntrinsics, p: np.ndarray) -> Pixel:
    """
    Project a camera-frame point onto the image plane.

    Raises:
        BehindCameraError: If p.z <= 0.
    """
    x, y, z = (float(c) for c in p)
    if not z > 0:
        raise BehindCameraError("point lies behind the camera", z=z)
    return Pixel(K.fx * x / z + K.cx, K.fy * y / z + K.cy)


def distance_to_planar_depth(K: CameraIntrinsics, x: Pixel, dist: float) -> float:
    """
    Convert a distance along the pixel's ray into planar depth.

    Args:
        K: Camera intrinsics.
        x: Pixel whose ray the distance was measured along.
        dist: Distance from the camera centre (meters).

    Returns:
        dist / ||K^-1 (u, v, 1)||.
    """
    if not dist >= 0:
        raise InvalidArgumentError("distance must be non-negative", dist=dist)
    a = (x.u - K.cx) / K.fx
    b = (x.v - K.cy) / K.fy
    return dist / math.sqrt(a * a + b * b + 1.0)


def pixel_grid(K: CameraIntrinsics) -> tuple[np.ndarray, np.ndarray]:
    """Pixel centre coordinates (u, v), each of shape (height, width)."""
    v, u = np.meshgrid(
        np.arange(K.height, dtype=np.float64),
        np.arange(K.width, dtype=np.float64),
        indexing="ij",
    )
    return u, v


def ray_norms(K: CameraIntrinsics, u: np.ndarray | None = None, v: np.ndarray | None = None) -> np.ndarray:
    """
    ||K^-1 (u, v, 1)|| per pixel.

    Defaults to every pixel centre of the image.
    """
    if u is None or v is None:
        u, v = pixel_grid(K)
    a = (u - K.cx) / K.fx
    b = (v - K.cy) / K.fy
    return np.sqrt(a * a + b * b + 1.0)


def backproject_depth_map(K: CameraIntrinsics, depth: np.ndarray) -> np.ndarray:
    """
    Lift a planar depth raster to camera-frame points.

    Args:
        K: Camera intrinsics.
        depth: (height, width) planar depths; NaN entries stay NaN.

    Returns:
        (height, width, 3) points.
    """
    u, v = pixel_grid(K)
    return np.stack(
        [(u - K.cx) / K.fx * depth, (v - K.cy) / K.fy * depth, depth], axis=-1
    )


def project_points(
    K: CameraIntrinsics, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Project many camera-frame points without raising.

    Args:
        K: Camera intrinsics.
        points: (..., 3) points.

    Returns:
        (u, v, z); u and v are NaN where z <= 0.
    """
    z = points[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = z > 0
        u = np.where(safe, K.fx * points[..., 0] / np.where(safe, z, 1.0) + K.cx, np.nan)
        v = np.where(safe, K.fy * points[..., 1] / np.where(safe, z, 1.0) + K.cy, np.nan)
    return u, v, z


def patch_corner(anchor: Pixel, patch_size: int) -> tuple[int, int]:
    """
    Top-left pixel (column, row) of the l x l patch centred on an anchor.

    The patch covers columns ``c0 .. c0 + l - 1`` with
    ``c0 = floor(anchor.u - l / 2)`` (rows likewise), so anchors in
    ``[l/2, W - l/2] x [l/2, H - l/2]`` always give in-image patches.
    """
    half = patch_size / 2.0
    return int(math.floor(anchor.u - half)), int(math.floor(anchor.v - half))
