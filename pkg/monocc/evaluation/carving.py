"""Ground-truth occupancy by space carving.

A voxel is free if any sweep ray passes through it strictly before the ray
hits the scene; every voxel never swept is occupied. Rays are traversed with
an exact 3D DDA (Amanatides-Woo) over the cuboid, all rays of a sweep
stepping together.
"""

from dataclasses import dataclass

import numpy as np

from monocc.errors import InvalidArgumentError
from monocc.evaluation.voxels import EvalCuboid, VoxelGrid
from monocc.field.analytic import AnalyticField
from monocc.geometry.pose import Pose
from monocc.log import log

HIT_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Sweep:
    """Range-sensor rays: a sensor-to-world pose and sensor-frame unit directions."""

    pose: Pose
    directions: np.ndarray
    max_range: float = 80.0  # Length of rays that hit nothing

    def __post_init__(self):
        directions = np.asarray(self.directions, dtype=np.float64).reshape(-1, 3)
        norms = np.linalg.norm(directions, axis=1)
        if np.any(norms == 0):
            raise InvalidArgumentError("sweep directions must be non-zero")
        object.__setattr__(self, "directions", directions / norms[:, None])
        if not self.max_range > 0:
            raise InvalidArgumentError("max_range must be positive")

    def __len__(self) -> int:
        return int(self.directions.shape[0])


def lidar_sweep(
    pose: Pose,
    azimuth_deg: tuple[float, float] = (-60.0, 60.0),
    elevation_deg: tuple[float, float] = (-25.0, 3.0),
    azimuth_steps: int = 720,
    elevation_steps: int = 64,
    max_range: float = 80.0,
) -> Sweep:
    """
    Spinning-LiDAR style sweep in a camera-like sensor frame (z forward, y down).

    Args:
        pose: Sensor-to-world pose.
        azimuth_deg: Horizontal field of view, positive to the right.
        elevation_deg: Vertical field of view, positive upwards.
        azimuth_steps: Beams per row.
        elevation_steps: Rows (lasers).
        max_range: Range of rays that hit nothing.
    """
    az = np.radians(np.linspace(*azimuth_deg, azimuth_steps))
    el = np.radians(np.linspace(*elevation_deg, elevation_steps))
    az, el = np.meshgrid(az, el, indexing="ij")
    directions = np.stack(
        [np.cos(el) * np.sin(az), -np.sin(el), np.cos(el) * np.cos(az)], axis=-1
    )
    return Sweep(pose, directions.reshape(-1, 3), max_range)


def voxel_center_sweep(
    pose: Pose, cuboid: EvalCuboid, camera_pose: Pose, max_range: float = 80.0
) -> Sweep:
    """One ray from the sensor towards every voxel centre of the cuboid."""
    world = camera_pose.transform(cuboid.centers().reshape(-1, 3))
    local = pose.inverse().transform(world)
    return Sweep(pose, local, max_range)


def _traverse(
    free: np.ndarray,
    origins: np.ndarray,
    directions: np.ndarray,
    t_stop: np.ndarray,
    cuboid: EvalCuboid,
) -> None:
    """Mark every voxel entered at t < t_stop as free (camera-frame rays)."""
    lo, hi = cuboid.lo, cuboid.hi
    size = cuboid.voxel_size
    res = np.asarray(cuboid.resolution)

    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(directions != 0.0, 1.0 / directions, np.inf)
        t0 = np.where(directions != 0.0, (lo - origins) * inv, -np.inf)
        t1 = np.where(directions != 0.0, (hi - origins) * inv, np.inf)
    # Parallel rays outside a slab never enter it
    outside = (directions == 0.0) & ((origins < lo) | (origins > hi))
    t_near = np.max(np.minimum(t0, t1), axis=1)
    t_far = np.min(np.maximum(t0, t1), axis=1)
    t_near[outside.any(axis=1)] = np.inf

    t_enter = np.maximum(t_near, 0.0)
    t_exit = np.minimum(t_far, t_stop)
    keep = t_enter < t_exit - HIT_TOLERANCE
    if not keep.any():
        return
    o = origins[keep]
    d = directions[keep]
    inv = inv[keep]
    t_cur = t_enter[keep]
    t_exit = t_exit[keep]

    p = o + t_cur[:, None] * d
    idx = np.clip(np.floor((p - lo) / size).astype(np.int64), 0, res - 1)
    step = np.sign(d).astype(np.int64)
    boundary = lo + (idx + (step > 0)) * size
    with np.errstate(invalid="ignore"):
        t_next = np.where(step != 0, (boundary - o) * inv, np.inf)
    t_delta = np.where(step != 0, size * np.abs(inv), np.inf)

    rows = np.arange(len(t_cur))
    while rows.size:
        free[idx[:, 0], idx[:, 1], idx[:, 2]] = True
        axis = np.argmin(t_next, axis=1)
        sel = np.arange(rows.size)
        t_cur = t_next[sel, axis]
        idx[sel, axis] += step[sel, axis]
        t_next[sel, axis] += t_delta[sel, axis]
        inside = np.all((idx >= 0) & (idx < res), axis=1)
        alive = inside & (t_cur < t_exit - HIT_TOLERANCE)
        rows = rows[alive]
        idx, t_next, t_delta, step = idx[alive], t_next[alive], t_delta[alive], step[alive]
        t_exit = t_exit[alive]


def carve_ground_truth(
    scene: AnalyticField, sweeps: list[Sweep], cuboid: EvalCuboid, camera_pose: Pose
) -> VoxelGrid:
    """
    Carve free space out of the evaluation cuboid.

    Args:
        scene: Analytic scene supplying exact first hits.
        sweeps: Range sweeps (at least one).
        cuboid: Evaluation cuboid in the camera frame.
        camera_pose: Evaluation camera-to-world pose.

    Returns:
        VoxelGrid: occupied unless some ray passed through before its hit.
    """
    if not sweeps:
        raise InvalidArgumentError("need at least one sweep")
    free = np.zeros(cuboid.resolution, dtype=bool)
    to_camera = camera_pose.inverse()
    for sweep in sweeps:
        if len(sweep) == 0:
            continue
        origins = np.broadcast_to(sweep.pose.translation, sweep.directions.shape)
        directions = sweep.pose.rotate(sweep.directions)
        hits, _ = scene.first_hits(origins, directions)
        t_stop = np.where(np.isinf(hits), sweep.max_range, hits)
        _traverse(
            free,
            to_camera.transform(origins),
            to_camera.rotate(directions),
            t_stop,
            cuboid,
        )
    log("CARVE", f"{len(sweeps)} sweeps, {int(free.sum())} of {free.size} voxels free")
    return VoxelGrid(cuboid, ~free)


__all__ = [
    "Sweep",
    "lidar_sweep",
    "voxel_center_sweep",
    "carve_ground_truth",
]
