"""Per-image instance metadata consumed by the mixture sampler."""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import DescriptorParseError, InvalidArgumentError
from monocc.geometry.camera import Pixel


@dataclass(frozen=True)
class InstanceMeta:
    """
    One detected instance.

    Attributes:
        category: Detector category, resolved through the strategy table.
        center: Box centre l_k in pixels.
        half_extents: Box half size b_k as (half-height, half-width) in pixels.
        area: Mask area s_k in pixels^2.
    """

    category: str
    center: Pixel
    half_extents: tuple[float, float]
    area: float

    def __post_init__(self):
        hh, hw = (float(b) for b in self.half_extents)
        if not (hh > 0 and hw > 0):
            raise InvalidArgumentError(
                "instance half extents must be positive", category=self.category
            )
        if not (np.isfinite(self.area) and self.area >= 0):
            raise InvalidArgumentError(
                "instance area must be finite and >= 0", category=self.category
            )
        if not self.center.is_finite():
            raise InvalidArgumentError("instance centre must be finite")
        object.__setattr__(self, "half_extents", (hh, hw))
        object.__setattr__(self, "area", float(self.area))

    @property
    def half_height(self) -> float:
        return self.half_extents[0]

    @property
    def half_width(self) -> float:
        return self.half_extents[1]

    def bbox_mask(self, width: int, height: int) -> np.ndarray:
        """(H, W) mask of pixel centres inside the box centre +/- b."""
        cols = np.arange(width, dtype=np.float64)
        rows = np.arange(height, dtype=np.float64)
        in_u = np.abs(cols - self.center.u) <= self.half_width
        in_v = np.abs(rows - self.center.v) <= self.half_height
        return in_v[:, None] & in_u[None, :]

    def to_dict(self) -> dict[str, Any]:
        return {
            "category": self.category,
            "center": [self.center.u, self.center.v],
            "half_extents": list(self.half_extents),
            "area": self.area,
        }


def instance_from_dict(data: dict[str, Any], where: str = "instances[0]") -> InstanceMeta:
    """
    Build an instance from ``{"category", "center", "half_extents", "area"}``.

    Raises:
        DescriptorParseError: With the dotted field path on malformed input.
    """
    if not isinstance(data, dict):
        raise DescriptorParseError("instance must be an object", field=where)
    for key in ("category", "center", "half_extents", "area"):
        if key not in data:
            raise DescriptorParseError(f"missing '{key}'", field=f"{where}.{key}")
    try:
        u, v = (float(c) for c in data["center"])
    except (TypeError, ValueError) as e:
        raise DescriptorParseError(
            "center must be [u, v]", field=f"{where}.center"
        ) from e
    try:
        hh, hw = (float(b) for b in data["half_extents"])
    except (TypeError, ValueError) as e:
        raise DescriptorParseError(
            "half_extents must be [hh, hw]", field=f"{where}.half_extents"
        ) from e
    try:
        return InstanceMeta(
            category=str(data["category"]),
            center=Pixel(u, v),
            half_extents=(hh, hw),
            area=float(data["area"]),
        )
    except (InvalidArgumentError, TypeError, ValueError) as e:
        raise DescriptorParseError(str(e), field=where) from e


def load_instances(path: str | Path) -> list[InstanceMeta]:
    """Read an instance JSON file (a list of instance objects)."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DescriptorParseError(
            f"invalid JSON in {path}: {e.msg}", line=e.lineno, column=e.colno
        ) from e
    if not isinstance(data, list):
        raise DescriptorParseError("instance file must hold a JSON list", field="")
    return [instance_from_dict(item, f"instances[{i}]") for i, item in enumerate(data)]


def save_instances(path: str | Path, instances: list[InstanceMeta]) -> Path:
    """Write instances as a JSON list."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump([inst.to_dict() for inst in instances], f, indent=2, sort_keys=True)
        f.write("\n")
    return path
