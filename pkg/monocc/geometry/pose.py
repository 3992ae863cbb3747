"""Rigid transforms.

A Pose maps points from a local frame into a parent frame,
``p_parent = rotation @ p_local + translation``. Camera poses are
camera-to-world.
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from monocc.errors import InvalidArgumentError

ORTHONORMAL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class Pose:
    """Rotation (3x3, orthonormal, det 1) plus translation (meters)."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rotation = np.array(self.rotation, dtype=np.float64)
        translation = np.array(self.translation, dtype=np.float64).reshape(-1)
        if rotation.shape != (3, 3) or translation.shape != (3,):
            raise InvalidArgumentError(
                "pose needs a 3x3 rotation and a 3-vector translation"
            )
        if not (np.all(np.isfinite(rotation)) and np.all(np.isfinite(translation))):
            raise InvalidArgumentError("pose entries must be finite")
        if np.max(np.abs(rotation.T @ rotation - np.eye(3))) > ORTHONORMAL_TOLERANCE:
            raise InvalidArgumentError("rotation is not orthonormal")
        if abs(np.linalg.det(rotation) - 1.0) > ORTHONORMAL_TOLERANCE:
            raise InvalidArgumentError("rotation must have determinant 1")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, translation) -> "Pose":
        return cls(np.eye(3), np.asarray(translation, dtype=np.float64))

    @classmethod
    def from_axis_angle(cls, axis, angle: float, translation=(0.0, 0.0, 0.0)) -> "Pose":
        """
        Build a pose from a rotation axis and angle (radians) via Rodrigues.

        Args:
            axis: Rotation axis, any non-zero length.
            angle: Rotation angle in radians.
            translation: Translation in meters.
        """
        axis = np.asarray(axis, dtype=np.float64)
        norm = np.linalg.norm(axis)
        if norm == 0.0:
            raise InvalidArgumentError("rotation axis must be non-zero")
        k = axis / norm
        kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
        rotation = np.eye(3) + math.sin(angle) * kx + (1.0 - math.cos(angle)) * (kx @ kx)
        # Re-orthonormalize against accumulated rounding.
        u, _, vt = np.linalg.svd(rotation)
        return cls(u @ vt, translation)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Apply the pose to (..., 3) points."""
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    def rotate(self, vectors: np.ndarray) -> np.ndarray:
        """Apply only the rotation to (..., 3) vectors."""
        return np.asarray(vectors, dtype=np.float64) @ self.rotation.T

    def inverse(self) -> "Pose":
        rt = self.rotation.T
        return Pose(rt, -rt @ self.translation)

    def compose(self, other: "Pose") -> "Pose":
        """Return ``self ∘ other``: apply ``other`` first, then ``self``."""
        return Pose(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def as_matrix(self) -> np.ndarray:
        """The 4x4 homogeneous matrix."""
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def to_dict(self) -> dict[str, Any]:
        return {
            "rotation": self.rotation.tolist(),
            "translation": self.translation.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Pose":
        """
        Parse a pose.

        Accepts either ``{"rotation": 3x3, "translation": [x, y, z]}`` or
        ``{"axis": [x, y, z], "angle_deg": a, "translation": [...]}``.
        """
        translation = data.get("translation", [0.0, 0.0, 0.0])
        if "rotation" in data:
            return cls(np.asarray(data["rotation"], dtype=np.float64), translation)
        if "axis" in data:
            return cls.from_axis_angle(
                data["axis"], math.radians(float(data.get("angle_deg", 0.0))), translation
            )
        return cls.from_translation(translation)


def relative_pose(target: Pose, source: Pose) -> Pose:
    """
    Transform taking target-camera points into the source camera frame.

    Args:
        target: Camera-to-world pose of the target view.
        source: Camera-to-world pose of the source view.

    Returns:
        ``source^-1 ∘ target``.
    """
    return source.inverse().compose(target)
