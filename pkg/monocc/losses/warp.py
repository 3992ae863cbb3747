"""Depth-based image warping between two camera frames.

For a target pixel x with planar depth D(x):

    p = D(x) K^-1 x̃,   p' = T p,   x' = project(K, p')

and the warped image at x is the source image bilinearly sampled at x'.
T maps target-camera points into the source camera frame, e.g.
``relative_pose(target_pose, source_pose)``.
"""

from dataclasses import dataclass

import numpy as np

from monocc.errors import InvalidArgumentError
from monocc.geometry.camera import CameraIntrinsics, backproject_depth_map, project_points
from monocc.geometry.pose import Pose
from monocc.maps import DepthMap, Image

SNAP_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class WarpResult:
    """Warped image plus the pixels that received a valid sample."""

    warped: Image
    validity: np.ndarray  # (H, W) bool
    u: np.ndarray  # (H, W) sampled source coordinates, NaN where undefined
    v: np.ndarray

    @property
    def valid_count(self) -> int:
        return int(self.validity.sum())


def _snap(coords: np.ndarray) -> np.ndarray:
    nearest = np.rint(coords)
    return np.where(np.abs(coords - nearest) < SNAP_TOLERANCE, nearest, coords)


def reprojection_coordinates(
    depth: DepthMap, K: CameraIntrinsics, T: Pose
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Source-image coordinates of every target pixel.

    Args:
        depth: Target-frame planar depth, sized like the image of K.
        K: Shared intrinsics.
        T: Target-camera to source-camera transform.

    Returns:
        (u', v', z'), each (H, W). u' and v' are NaN where the depth is
        invalid or the point lands behind the source camera. Coordinates
        within 1e-9 of an integer are snapped onto it.
    """
    if depth.shape != K.shape:
        raise InvalidArgumentError(
            "depth map size does not match the intrinsics",
            depth=list(depth.shape),
            image=list(K.shape),
        )
    points = T.transform(backproject_depth_map(K, depth.values).reshape(-1, 3))
    u, v, z = project_points(K, points)
    shape = depth.shape
    return _snap(u).reshape(shape), _snap(v).reshape(shape), z.reshape(shape)


def bilinear_sample(
    values: np.ndarray, u: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """
    Sample an (H, W, C) raster at continuous pixel positions.

    Positions outside [0, W-1] x [0, H-1] or non-finite are invalid and
    sample to 0; there is no edge clamping.

    Returns:
        (samples (..., C), valid (...)).
    """
    h, w = values.shape[:2]
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    valid = np.isfinite(u) & np.isfinite(v)
    valid &= (u >= 0) & (u <= w - 1) & (v >= 0) & (v <= h - 1)
    uu = np.where(valid, u, 0.0)
    vv = np.where(valid, v, 0.0)
    u0 = np.floor(uu).astype(np.int64)
    v0 = np.floor(vv).astype(np.int64)
    fu = (uu - u0)[..., None]
    fv = (vv - v0)[..., None]
    u1 = np.minimum(u0 + 1, w - 1)
    v1 = np.minimum(v0 + 1, h - 1)
    top = (1.0 - fu) * values[v0, u0] + fu * values[v0, u1]
    bottom = (1.0 - fu) * values[v1, u0] + fu * values[v1, u1]
    samples = (1.0 - fv) * top + fv * bottom
    return np.where(valid[..., None], samples, 0.0), valid


def warp_image(source: Image, depth: DepthMap, K: CameraIntrinsics, T: Pose) -> WarpResult:
    """
    Synthesize the target view from a source image.

    Args:
        source: Source image.
        depth: Target-frame planar depth.
        K: Shared intrinsics.
        T: Target-camera to source-camera transform.

    Returns:
        WarpResult; a pixel is valid when its depth is valid, z' > 0 and the
        source position lies inside the image.

    Raises:
        InvalidArgumentError: If image, depth and intrinsics differ in size.
    """
    if source.shape != depth.shape:
        raise InvalidArgumentError(
            "image and depth sizes differ",
            image=list(source.shape),
            depth=list(depth.shape),
        )
    u, v, z = reprojection_coordinates(depth, K, T)
    samples, valid = bilinear_sample(source.values, u, v)
    with np.errstate(invalid="ignore"):
        valid &= z > 0
    samples[~valid] = 0.0
    return WarpResult(warped=Image(np.clip(samples, 0.0, 1.0)), validity=valid, u=u, v=v)
