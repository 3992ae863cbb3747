"""Fixture bundle layout.

A bundle mirrors a minimal KITTI-style split::

    <root>/
        scene.json            normalized scene descriptor
        poses.json            intrinsics plus camera-to-world pose per view
        images/<view>.ppm
        depth_gt/<view>.pfm
        depth_pseudo/<view>.pfm
        instances/<view>.json
"""

from dataclasses import dataclass
from pathlib import Path

from monocc.errors import DescriptorParseError, InvalidArgumentError
from monocc.geometry.camera import CameraIntrinsics
from monocc.geometry.pose import Pose
from monocc.io.jsonio import read_json, write_json
from monocc.io.rasters import read_depth, read_ppm
from monocc.io.scene import SceneDescriptor, load_scene
from monocc.maps import DepthMap, Image
from monocc.sampler.instances import InstanceMeta, load_instances

IMAGES_DIR = "images"
DEPTH_GT_DIR = "depth_gt"
DEPTH_PSEUDO_DIR = "depth_pseudo"
INSTANCES_DIR = "instances"
POSES_FILE = "poses.json"
SCENE_FILE = "scene.json"


def image_path(root: str | Path, view: str) -> Path:
    return Path(root) / IMAGES_DIR / f"{view}.ppm"


def depth_gt_path(root: str | Path, view: str) -> Path:
    return Path(root) / DEPTH_GT_DIR / f"{view}.pfm"


def depth_pseudo_path(root: str | Path, view: str) -> Path:
    return Path(root) / DEPTH_PSEUDO_DIR / f"{view}.pfm"


def instances_path(root: str | Path, view: str) -> Path:
    return Path(root) / INSTANCES_DIR / f"{view}.json"


def write_poses(root: str | Path, K: CameraIntrinsics, poses: dict[str, Pose]) -> Path:
    """Write poses.json: intrinsics plus one pose per view, in view order."""
    return write_json(
        Path(root) / POSES_FILE,
        {
            "intrinsics": K.to_dict(),
            "views": list(poses),
            "poses": {name: pose.to_dict() for name, pose in poses.items()},
        },
    )


@dataclass(frozen=True, eq=False)
class FixtureBundle:
    """Read access to a bundle written by the synth command."""

    root: Path
    intrinsics: CameraIntrinsics
    poses: dict[str, Pose]
    scene: SceneDescriptor

    def _check(self, view: str) -> None:
        if view not in self.poses:
            raise InvalidArgumentError(
                f"bundle has no view '{view}'", view=view, views=list(self.poses)
            )

    def pose(self, view: str) -> Pose:
        self._check(view)
        return self.poses[view]

    def image(self, view: str) -> Image:
        self._check(view)
        return read_ppm(image_path(self.root, view))

    def depth_gt(self, view: str) -> DepthMap:
        self._check(view)
        return read_depth(depth_gt_path(self.root, view))

    def depth_pseudo(self, view: str) -> DepthMap:
        self._check(view)
        return read_depth(depth_pseudo_path(self.root, view))

    def instances(self, view: str) -> list[InstanceMeta]:
        self._check(view)
        return load_instances(instances_path(self.root, view))


def open_bundle(root: str | Path) -> FixtureBundle:
    """
    Open a fixture bundle.

    Raises:
        InvalidArgumentError: If the directory or its pose file is missing.
        DescriptorParseError: If poses.json or scene.json is malformed.
    """
    root = Path(root)
    poses_file = root / POSES_FILE
    if not poses_file.is_file():
        raise InvalidArgumentError(f"not a fixture bundle: {root}", path=str(root))
    data = read_json(poses_file)
    try:
        K = CameraIntrinsics.from_dict(data["intrinsics"])
        poses = {name: Pose.from_dict(data["poses"][name]) for name in data["views"]}
    except (KeyError, TypeError, ValueError) as e:
        raise DescriptorParseError(f"malformed {poses_file}: {e}", field="poses") from e
    return FixtureBundle(root, K, poses, load_scene(root / SCENE_FILE))


__all__ = [
    "SCENE_FILE",
    "POSES_FILE",
    "FixtureBundle",
    "open_bundle",
    "write_poses",
    "image_path",
    "depth_gt_path",
    "depth_pseudo_path",
    "instances_path",
]
