"""Occupancy and depth evaluation protocol."""

from monocc.evaluation.carving import (
    Sweep,
    carve_ground_truth,
    lidar_sweep,
    voxel_center_sweep,
)
from monocc.evaluation.depth_metrics import DepthEvalReport, compute_errors, depth_metrics
from monocc.evaluation.occupancy import (
    OccupancyMetrics,
    depth_to_occupancy_band,
    occupancy_metrics,
    visibility_partition,
)
from monocc.evaluation.voxels import (
    EvalCuboid,
    VoxelGrid,
    occupancy_threshold,
    voxelize_prediction,
)

__all__ = [
    "EvalCuboid",
    "VoxelGrid",
    "occupancy_threshold",
    "voxelize_prediction",
    "Sweep",
    "lidar_sweep",
    "voxel_center_sweep",
    "carve_ground_truth",
    "visibility_partition",
    "depth_to_occupancy_band",
    "OccupancyMetrics",
    "occupancy_metrics",
    "DepthEvalReport",
    "compute_errors",
    "depth_metrics",
]
