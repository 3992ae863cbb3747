"""Ray generation through image pixels."""

from dataclasses import dataclass

import numpy as np

from monocc.errors import InvalidArgumentError
from monocc.geometry.camera import CameraIntrinsics, Pixel
from monocc.geometry.pose import Pose

UNIT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Ray:
    """Origin (meters) plus unit direction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=np.float64).reshape(3)
        direction = np.asarray(self.direction, dtype=np.float64).reshape(3)
        if abs(np.linalg.norm(direction) - 1.0) > UNIT_TOLERANCE:
            raise InvalidArgumentError("ray direction must be a unit vector")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)

    @classmethod
    def towards(cls, origin, direction) -> "Ray":
        """Build a ray, normalizing the direction."""
        direction = np.asarray(direction, dtype=np.float64)
        norm = np.linalg.norm(direction)
        if norm == 0.0:
            raise InvalidArgumentError("ray direction must be non-zero")
        return cls(origin, direction / norm)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction


def ray_through_pixel(K: CameraIntrinsics, pose: Pose, x: Pixel) -> Ray:
    """
    World-frame ray from the camera centre through a pixel.

    Args:
        K: Camera intrinsics.
        pose: Camera-to-world pose.
        x: Pixel inside the image bounds.

    Returns:
        Ray with origin at the camera centre and direction
        normalize(rotation @ K^-1 (u, v, 1)).
    """
    if not (x.is_finite() and K.contains(x.u, x.v)):
        raise InvalidArgumentError("pixel lies outside the image", u=x.u, v=x.v)
    local = np.array([(x.u - K.cx) / K.fx, (x.v - K.cy) / K.fy, 1.0])
    direction = pose.rotation @ local
    return Ray(pose.translation.copy(), direction / np.linalg.norm(direction))


def rays_through_pixels(
    K: CameraIntrinsics, pose: Pose, u: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Batched ray_through_pixel.

    Args:
        K: Camera intrinsics.
        pose: Camera-to-world pose.
        u: Pixel u coordinates, any shape.
        v: Pixel v coordinates, same shape as u.

    Returns:
        (origins, directions), each of shape (N, 3) for N = u.size.
    """
    u = np.asarray(u, dtype=np.float64).reshape(-1)
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    inside = (u >= 0) & (u <= K.width - 1) & (v >= 0) & (v <= K.height - 1)
    if not np.all(inside):
        raise InvalidArgumentError("pixels lie outside the image")
    local = np.stack([(u - K.cx) / K.fx, (v - K.cy) / K.fy, np.ones_like(u)], axis=-1)
    directions = pose.rotate(local)
    directions /= np.linalg.norm(directions, axis=-1, keepdims=True)
    origins = np.broadcast_to(pose.translation, directions.shape).copy()
    return origins, directions
