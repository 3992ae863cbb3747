"""Pinhole geometry: intrinsics, rigid poses and rays."""

from monocc.geometry.camera import (
    CameraIntrinsics,
    Pixel,
    backproject,
    backproject_depth_map,
    distance_to_planar_depth,
    patch_corner,
    pixel_grid,
    project,
    project_points,
    ray_norms,
)
from monocc.geometry.pose import Pose, relative_pose
from monocc.geometry.rays import Ray, ray_through_pixel, rays_through_pixels

__all__ = [
    "CameraIntrinsics",
    "Pixel",
    "Pose",
    "Ray",
    "backproject",
    "project",
    "distance_to_planar_depth",
    "ray_through_pixel",
    "rays_through_pixels",
    "relative_pose",
    "patch_corner",
    "pixel_grid",
    "ray_norms",
    "backproject_depth_map",
    "project_points",
]
