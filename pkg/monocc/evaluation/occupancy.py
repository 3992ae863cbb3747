"""Visibility partition, occupancy metrics and the depth-band baseline."""

from dataclasses import asdict, dataclass

import numpy as np

from monocc.errors import InvalidArgumentError
from monocc.evaluation.voxels import EvalCuboid, VoxelGrid
from monocc.geometry.camera import CameraIntrinsics, project_points, ray_norms
from monocc.maps import DepthMap


def _surface_lookup(
    cuboid: EvalCuboid, K: CameraIntrinsics, depth: DepthMap
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Per voxel: ray distance r, surface distance along the nearest pixel's
    ray, and whether the centre projects into the image.
    """
    if depth.shape != K.shape:
        raise InvalidArgumentError(
            "depth map size does not match the intrinsics",
            depth=list(depth.shape),
            image=list(K.shape),
        )
    centers = cuboid.centers()
    r = np.linalg.norm(centers, axis=-1)
    u, v, _ = project_points(K, centers)
    with np.errstate(invalid="ignore"):
        cols = np.rint(u)
        rows = np.rint(v)
        inside = (cols >= 0) & (cols <= K.width - 1) & (rows >= 0) & (rows <= K.height - 1)
    cols = np.where(inside, cols, 0).astype(np.int64)
    rows = np.where(inside, rows, 0).astype(np.int64)
    surface = depth.values[rows, cols] * ray_norms(K)[rows, cols]
    return r, surface, inside


def visibility_partition(
    grid: VoxelGrid, K: CameraIntrinsics, depth: DepthMap
) -> VoxelGrid:
    """
    Mark voxels observable from the evaluation camera.

    A voxel is visible when its centre projects into the image and its ray
    distance is at most the ground-truth surface distance at that pixel plus
    half a voxel diagonal. Pixels without ground truth block nothing.

    Args:
        grid: Voxel grid (cuboid in the camera frame).
        K: Evaluation intrinsics.
        depth: Ground-truth planar depth of the evaluation camera.

    Returns:
        The grid with visibility filled in.
    """
    r, surface, inside = _surface_lookup(grid.cuboid, K, depth)
    tolerance = 0.5 * grid.cuboid.diagonal
    with np.errstate(invalid="ignore"):
        unblocked = np.isnan(surface) | (r <= surface + tolerance)
    return grid.with_visibility(inside & unblocked)


def depth_to_occupancy_band(
    depth: DepthMap, K: CameraIntrinsics, cuboid: EvalCuboid, band: float = 4.0
) -> VoxelGrid:
    """
    Occupancy from a depth map: everything within ``band`` meters behind the
    visible surface.

    A voxel is occupied iff its centre projects onto a pixel with valid depth
    and d_s <= r <= d_s + band, where r is the centre's ray distance and d_s
    the surface distance along that pixel's ray. ``band=inf`` fills
    everything behind the surface.
    """
    if not band > 0:
        raise InvalidArgumentError("band must be positive", band=band)
    r, surface, inside = _surface_lookup(cuboid, K, depth)
    with np.errstate(invalid="ignore"):
        occupied = inside & (r >= surface) & (r <= surface + band)
    return VoxelGrid(cuboid, occupied)


@dataclass(frozen=True)
class OccupancyMetrics:
    """Scene occupancy scores; None marks an undefined metric."""

    o_acc: float
    o_rec: float | None
    ie_acc: float | None
    ie_rec: float | None
    voxels: int
    occupied: int
    invisible: int
    invisible_occupied: int

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(num: int, den: int) -> float | None:
    return None if den == 0 else num / den


def occupancy_metrics(
    pred: VoxelGrid, gt: VoxelGrid, mask: np.ndarray | None = None
) -> OccupancyMetrics:
    """
    Compare predicted and ground-truth occupancy.

    Args:
        pred: Predicted occupancy.
        gt: Ground truth with visibility filled in.
        mask: Optional voxel mask restricting every metric (object-level scores).

    Returns:
        OccupancyMetrics: O_acc over all voxels, O_rec over occupied voxels,
        IE_acc over invisible voxels, IE_rec over invisible occupied voxels.

    Raises:
        InvalidArgumentError: On mismatched cuboids, missing visibility or an
            empty mask.
    """
    if pred.cuboid != gt.cuboid:
        raise InvalidArgumentError("prediction and ground truth use different cuboids")
    visibility = gt.visibility if gt.visibility is not None else pred.visibility
    if visibility is None:
        raise InvalidArgumentError("ground truth carries no visibility")
    support = np.ones(gt.cuboid.resolution, dtype=bool)
    if mask is not None:
        support = np.asarray(mask, dtype=bool)
        if support.shape != gt.cuboid.resolution:
            raise InvalidArgumentError("mask shape does not match the cuboid")
    voxels = int(support.sum())
    if voxels == 0:
        raise InvalidArgumentError("mask selects no voxel")

    agree = pred.occupancy == gt.occupancy
    occupied = support & gt.occupancy
    invisible = support & ~visibility
    invisible_occupied = invisible & gt.occupancy
    return OccupancyMetrics(
        o_acc=float(agree[support].mean()),
        o_rec=_ratio(int(pred.occupancy[occupied].sum()), int(occupied.sum())),
        ie_acc=_ratio(int(agree[invisible].sum()), int(invisible.sum())),
        ie_rec=_ratio(
            int(pred.occupancy[invisible_occupied].sum()), int(invisible_occupied.sum())
        ),
        voxels=voxels,
        occupied=int(occupied.sum()),
        invisible=int(invisible.sum()),
        invisible_occupied=int(invisible_occupied.sum()),
    )
