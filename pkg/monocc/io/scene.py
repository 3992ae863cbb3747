"""Scene descriptors: the JSON source of every synthetic fixture.

Example::

    {
      "intrinsics": {"fx": 100, "fy": 100, "cx": 31.5, "cy": 23.5,
                     "width": 64, "height": 48},
      "camera_pose": {"translation": [0, 0, 0]},
      "aux_poses": {"next": {"translation": [0.2, 0, 0]}},
      "sweeps": [{"kind": "voxel_centers"}],
      "background": [0, 0, 0],
      "primitives": [{"shape": "box", "center": [0, 0, 12],
                      "half_extents": [10, 5, 2], "color": [0.8, 0.2, 0.2],
                      "category": "car"}],
      "pseudo_depth": {"kind": "scaled", "scale": 2.0}
    }
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import DescriptorParseError, MonoccError
from monocc.evaluation.carving import Sweep, lidar_sweep, voxel_center_sweep
from monocc.evaluation.voxels import EvalCuboid
from monocc.field.analytic import AnalyticField, primitive_from_dict
from monocc.geometry.camera import CameraIntrinsics
from monocc.geometry.pose import Pose
from monocc.io.jsonio import read_json
from monocc.maps import DepthMap
from monocc.sampler.instances import InstanceMeta, instance_from_dict

CAMERA_VIEW = "camera"


class PseudoDepthKind(Enum):
    """How pseudo depth is derived from ground truth."""

    EXACT = "exact"
    SCALED = "scaled"
    NOISE = "noise"


@dataclass(frozen=True)
class PseudoDepthSpec:
    """Pseudo-depth generation: exact copy, global scale, or log-normal noise."""

    kind: PseudoDepthKind = PseudoDepthKind.EXACT
    scale: float = 1.0
    sigma: float = 0.0  # Std of the log-depth noise

    def apply(self, gt: DepthMap, rng: np.random.Generator) -> DepthMap:
        if self.kind is PseudoDepthKind.EXACT:
            return DepthMap(gt.values)
        if self.kind is PseudoDepthKind.SCALED:
            return gt.scaled(self.scale)
        noise = np.exp(self.sigma * rng.standard_normal(gt.shape))
        return DepthMap(gt.values * self.scale * noise)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "scale": self.scale, "sigma": self.sigma}


@dataclass(frozen=True, eq=False)
class SceneDescriptor:
    """A parsed scene descriptor."""

    intrinsics: CameraIntrinsics
    camera_pose: Pose
    field: AnalyticField
    aux_poses: dict[str, Pose] = field(default_factory=dict)
    sweeps: tuple[dict[str, Any], ...] = ()
    instances: tuple[InstanceMeta, ...] | None = None
    pseudo_depth: PseudoDepthSpec = field(default_factory=PseudoDepthSpec)

    def views(self) -> dict[str, Pose]:
        """Evaluation camera first, then the auxiliary views in file order."""
        return {CAMERA_VIEW: self.camera_pose, **self.aux_poses}

    def build_sweeps(self, cuboid: EvalCuboid) -> list[Sweep]:
        """
        Instantiate the sweep list; defaults to one voxel-centre sweep from
        the evaluation camera.

        Raises:
            DescriptorParseError: Naming the sweep and key of a bad entry.
        """
        specs = self.sweeps or ({"kind": "voxel_centers"},)
        sweeps = []
        for i, spec in enumerate(specs):
            where = f"sweeps[{i}]"
            pose = _parse(Pose.from_dict, spec["pose"], f"{where}.pose") if "pose" in spec else self.camera_pose
            max_range = _parse(float, spec.get("max_range", 80.0), f"{where}.max_range")
            kind = spec.get("kind", "lidar")
            if kind == "voxel_centers":
                sweeps.append(voxel_center_sweep(pose, cuboid, self.camera_pose, max_range))
            elif kind == "lidar":
                sweeps.append(
                    _parse(
                        lambda s: lidar_sweep(
                            pose,
                            azimuth_deg=tuple(float(a) for a in s.get("azimuth_deg", (-60.0, 60.0))),
                            elevation_deg=tuple(float(e) for e in s.get("elevation_deg", (-25.0, 3.0))),
                            azimuth_steps=int(s.get("azimuth_steps", 720)),
                            elevation_steps=int(s.get("elevation_steps", 64)),
                            max_range=max_range,
                        ),
                        spec,
                        where,
                    )
                )
            elif kind == "rays":
                sweeps.append(
                    _parse(
                        lambda s: Sweep(pose, np.asarray(s["directions"], dtype=np.float64).reshape(-1, 3), max_range),
                        spec,
                        where,
                    )
                )
            else:
                raise DescriptorParseError(f"unknown sweep kind '{kind}'", field=f"{where}.kind")
        return sweeps

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "intrinsics": self.intrinsics.to_dict(),
            "camera_pose": self.camera_pose.to_dict(),
            "aux_poses": {k: p.to_dict() for k, p in self.aux_poses.items()},
            "sweeps": list(self.sweeps),
            "background": self.field.background.tolist(),
            "primitives": [p.to_dict() for p in self.field.primitives],
            "pseudo_depth": self.pseudo_depth.to_dict(),
        }
        if self.instances is not None:
            data["instances"] = [i.to_dict() for i in self.instances]
        return data


def _parse(builder, value, where: str):
    try:
        return builder(value)
    except DescriptorParseError:
        raise
    except (MonoccError, KeyError, TypeError, ValueError) as e:
        detail = f"missing key {e}" if isinstance(e, KeyError) else str(e)
        raise DescriptorParseError(f"invalid {where}: {detail}", field=where) from e


def _require(data: dict[str, Any], key: str) -> Any:
    if key not in data:
        raise DescriptorParseError(f"missing '{key}'", field=key)
    return data[key]


def _pseudo_depth(data: Any) -> PseudoDepthSpec:
    if not isinstance(data, dict):
        raise TypeError("pseudo_depth must be an object")
    kind = PseudoDepthKind(data.get("kind", "exact"))
    scale = float(data.get("scale", 1.0))
    sigma = float(data.get("sigma", 0.0))
    if not (scale > 0 and math.isfinite(scale)):
        raise ValueError("scale must be positive")
    if not sigma >= 0:
        raise ValueError("sigma must be non-negative")
    return PseudoDepthSpec(kind, scale, sigma)


def scene_from_dict(data: Any) -> SceneDescriptor:
    """
    Validate and build a scene descriptor.

    Raises:
        DescriptorParseError: Naming the dotted path of the offending field.
    """
    if not isinstance(data, dict):
        raise DescriptorParseError("scene descriptor must be a JSON object", field="")
    known = {
        "intrinsics",
        "camera_pose",
        "aux_poses",
        "sweeps",
        "background",
        "primitives",
        "instances",
        "pseudo_depth",
    }
    for key in data:
        if key not in known:
            raise DescriptorParseError(f"unknown key '{key}'", field=key)

    intrinsics = _parse(CameraIntrinsics.from_dict, _require(data, "intrinsics"), "intrinsics")
    camera_pose = _parse(Pose.from_dict, data.get("camera_pose", {}), "camera_pose")

    aux = data.get("aux_poses", {})
    if not isinstance(aux, dict):
        raise DescriptorParseError("aux_poses must map names to poses", field="aux_poses")
    aux_poses = {}
    for name, pose in aux.items():
        if name == "camera":
            raise DescriptorParseError("'camera' is reserved", field=f"aux_poses.{name}")
        aux_poses[name] = _parse(Pose.from_dict, pose, f"aux_poses.{name}")

    primitives = data.get("primitives", [])
    if not isinstance(primitives, list):
        raise DescriptorParseError("primitives must be a list", field="primitives")
    parsed = tuple(
        primitive_from_dict(p, f"primitives[{i}]") for i, p in enumerate(primitives)
    )
    background = data.get("background", [0.0, 0.0, 0.0])
    scene_field = _parse(
        lambda b: AnalyticField(parsed, np.asarray(b, dtype=np.float64).reshape(3)),
        background,
        "background",
    )

    sweeps = data.get("sweeps", [])
    if not isinstance(sweeps, list) or not all(isinstance(s, dict) for s in sweeps):
        raise DescriptorParseError("sweeps must be a list of objects", field="sweeps")

    instances = None
    if "instances" in data:
        if not isinstance(data["instances"], list):
            raise DescriptorParseError("instances must be a list", field="instances")
        instances = tuple(
            instance_from_dict(item, f"instances[{i}]")
            for i, item in enumerate(data["instances"])
        )

    pseudo = _parse(_pseudo_depth, data.get("pseudo_depth", {}), "pseudo_depth")
    return SceneDescriptor(
        intrinsics=intrinsics,
        camera_pose=camera_pose,
        field=scene_field,
        aux_poses=aux_poses,
        sweeps=tuple(sweeps),
        instances=instances,
        pseudo_depth=pseudo,
    )


def load_scene(path: str | Path) -> SceneDescriptor:
    """Read and validate a scene descriptor file."""
    return scene_from_dict(read_json(path))
