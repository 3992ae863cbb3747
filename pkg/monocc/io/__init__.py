"""File formats and scene descriptors."""

from monocc.io.bundle import FixtureBundle, open_bundle, write_poses
from monocc.io.jsonio import dumps, read_json, write_json
from monocc.io.rasters import (
    read_depth,
    read_pfm,
    read_ppm,
    write_depth,
    write_patch_overlay,
    write_pfm,
    write_ppm,
)
from monocc.io.scene import (
    CAMERA_VIEW,
    PseudoDepthKind,
    PseudoDepthSpec,
    SceneDescriptor,
    load_scene,
    scene_from_dict,
)

__all__ = [
    "FixtureBundle",
    "open_bundle",
    "write_poses",
    "read_json",
    "write_json",
    "dumps",
    "read_pfm",
    "write_pfm",
    "read_ppm",
    "write_ppm",
    "read_depth",
    "write_depth",
    "write_patch_overlay",
    "CAMERA_VIEW",
    "PseudoDepthKind",
    "PseudoDepthSpec",
    "SceneDescriptor",
    "load_scene",
    "scene_from_dict",
]
