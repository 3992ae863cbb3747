"""Evaluation cuboid and voxel grids.

The cuboid is axis-aligned in the evaluation camera frame: w along camera x,
h along camera y and d along camera z (the optical axis).
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import FormatError, InvalidArgumentError
from monocc.field.base import DensityField
from monocc.geometry.pose import Pose


@dataclass(frozen=True)
class EvalCuboid:
    """Evaluation volume and its voxel resolution (nw, nh, nd)."""

    w_range: tuple[float, float] = (-4.0, 4.0)
    h_range: tuple[float, float] = (-1.0, 0.0)
    d_range: tuple[float, float] = (4.0, 20.0)
    resolution: tuple[int, int, int] = (64, 16, 128)

    def __post_init__(self):
        for name in ("w_range", "h_range", "d_range"):
            lo, hi = (float(x) for x in getattr(self, name))
            if not lo < hi:
                raise InvalidArgumentError(f"{name} must be increasing", **{name: [lo, hi]})
            object.__setattr__(self, name, (lo, hi))
        resolution = tuple(int(n) for n in self.resolution)
        if len(resolution) != 3 or min(resolution) < 2:
            raise InvalidArgumentError("resolution needs three entries >= 2")
        object.__setattr__(self, "resolution", resolution)

    @classmethod
    def from_config(cls, config) -> "EvalCuboid":
        return cls(config.w_range, config.h_range, config.d_range, config.resolution)

    @property
    def lo(self) -> np.ndarray:
        return np.array([self.w_range[0], self.h_range[0], self.d_range[0]])

    @property
    def hi(self) -> np.ndarray:
        return np.array([self.w_range[1], self.h_range[1], self.d_range[1]])

    @property
    def voxel_size(self) -> np.ndarray:
        return (self.hi - self.lo) / np.asarray(self.resolution, dtype=np.float64)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.voxel_size))

    def centers(self) -> np.ndarray:
        """(nw, nh, nd, 3) voxel centres in the camera frame."""
        axes = [
            self.lo[i] + (np.arange(self.resolution[i]) + 0.5) * self.voxel_size[i]
            for i in range(3)
        ]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "w_range": list(self.w_range),
            "h_range": list(self.h_range),
            "d_range": list(self.d_range),
            "resolution": list(self.resolution),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "EvalCuboid":
        return cls(
            tuple(data["w_range"]),
            tuple(data["h_range"]),
            tuple(data["d_range"]),
            tuple(data["resolution"]),
        )


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    """Binary occupancy, plus visibility from the evaluation camera once known."""

    cuboid: EvalCuboid
    occupancy: np.ndarray
    visibility: np.ndarray | None = None

    def __post_init__(self):
        occupancy = np.asarray(self.occupancy, dtype=bool)
        if occupancy.shape != self.cuboid.resolution:
            raise InvalidArgumentError(
                "occupancy shape does not match the cuboid",
                shape=list(occupancy.shape),
                resolution=list(self.cuboid.resolution),
            )
        object.__setattr__(self, "occupancy", occupancy)
        if self.visibility is not None:
            visibility = np.asarray(self.visibility, dtype=bool)
            if visibility.shape != self.cuboid.resolution:
                raise InvalidArgumentError("visibility shape does not match the cuboid")
            object.__setattr__(self, "visibility", visibility)

    def with_visibility(self, visibility: np.ndarray) -> "VoxelGrid":
        return VoxelGrid(self.cuboid, self.occupancy, visibility)

    @property
    def occupied_count(self) -> int:
        return int(self.occupancy.sum())

    def save(self, path: str | Path) -> Path:
        """
        Write ``<path>.bits`` (packed occupancy, then visibility) and ``<path>.json``.

        Returns:
            Path of the JSON sidecar.
        """
        base = Path(path).with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        layers = [self.occupancy.reshape(-1)]
        if self.visibility is not None:
            layers.append(self.visibility.reshape(-1))
        np.packbits(np.concatenate(layers)).tofile(base.with_suffix(".bits"))
        sidecar_path = base.with_suffix(".json")
        with open(sidecar_path, "w", encoding="utf-8") as f:
            json.dump(
                {
                    "cuboid": self.cuboid.to_dict(),
                    "order": "C(w,h,d)",
                    "bit_order": "big",
                    "visibility": self.visibility is not None,
                },
                f,
                indent=2,
                sort_keys=True,
            )
        return sidecar_path

    @classmethod
    def load(cls, path: str | Path) -> "VoxelGrid":
        base = Path(path).with_suffix("")
        try:
            with open(base.with_suffix(".json"), "r", encoding="utf-8") as f:
                sidecar = json.load(f)
            cuboid = EvalCuboid.from_dict(sidecar["cuboid"])
            count = int(np.prod(cuboid.resolution))
            layers = 2 if sidecar.get("visibility") else 1
            bits = np.unpackbits(np.fromfile(base.with_suffix(".bits"), dtype=np.uint8))
            if bits.size < layers * count:
                raise ValueError("bit file is too short")
            bits = bits[: layers * count].astype(bool)
            occupancy = bits[:count].reshape(cuboid.resolution)
            visibility = bits[count:].reshape(cuboid.resolution) if layers == 2 else None
            return cls(cuboid, occupancy, visibility)
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as e:
            raise FormatError(f"malformed voxel file {base}: {e}") from e


def occupancy_threshold(tau: float) -> float:
    """σ·δ above which 1 - exp(-σ·δ) exceeds τ, i.e. -log(1 - τ)."""
    if not 0.0 < tau < 1.0:
        raise InvalidArgumentError("tau must lie in (0, 1)", tau=tau)
    return float(-np.log1p(-tau))


def voxelize_prediction(
    field: DensityField, cuboid: EvalCuboid, camera_pose: Pose, tau: float = 0.5
) -> VoxelGrid:
    """
    Threshold a density field at the voxel centres.

    A voxel is occupied when 1 - exp(-σ δ) > τ, with σ the density at the
    voxel centre and δ the voxel diagonal.

    Args:
        field: Density field (world frame).
        cuboid: Evaluation cuboid (camera frame).
        camera_pose: Evaluation camera-to-world pose.
        tau: Occupancy threshold in (0, 1).

    Returns:
        VoxelGrid without visibility.
    """
    threshold = occupancy_threshold(tau)
    world = camera_pose.transform(cuboid.centers().reshape(-1, 3))
    sigma = field.sigma(world).reshape(cuboid.resolution)
    return VoxelGrid(cuboid, sigma * cuboid.diagonal > threshold)
