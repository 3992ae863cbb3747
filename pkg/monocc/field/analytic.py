"""Analytic density fields built from boxes, spheres and half-spaces.

These give exact ground truth for rendering, carving and occupancy tests.
Overlapping primitives take the maximum density; the colour comes from the
densest primitive containing the point (first one on ties).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from monocc.errors import DescriptorParseError, InvalidArgumentError
from monocc.field.base import DensityField
from monocc.geometry.rays import Ray

# Density used for hard-surface fixtures: effectively opaque over 1 mm.
OPAQUE_DENSITY = 1e4


class Shape(Enum):
    """Primitive shape."""

    BOX = "box"
    SPHERE = "sphere"
    HALF_SPACE = "half_space"


# Descriptor keys each shape needs besides density, color and category.
_SHAPE_KEYS = {
    Shape.BOX: ("center", "half_extents"),
    Shape.SPHERE: ("center", "radius"),
    Shape.HALF_SPACE: ("point", "normal"),
}


@dataclass(frozen=True, eq=False)
class Primitive:
    """
    One solid of an analytic field.

    Box: ``center`` and ``half_extents`` (axis aligned).
    Sphere: ``center`` and ``radius``.
    Half-space: ``point`` on the plane and outward ``normal``; the solid is
    the side the normal points away from.
    """

    shape: Shape
    density: float = OPAQUE_DENSITY
    color: tuple[float, float, float] = (1.0, 1.0, 1.0)
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    half_extents: tuple[float, float, float] = (1.0, 1.0, 1.0)
    radius: float = 1.0
    point: tuple[float, float, float] = (0.0, 0.0, 0.0)
    normal: tuple[float, float, float] = (0.0, -1.0, 0.0)
    category: str | None = None

    def __post_init__(self):
        if not self.density >= 0:
            raise InvalidArgumentError("density must be non-negative", density=self.density)
        color = np.asarray(self.color, dtype=np.float64)
        if color.shape != (3,) or np.any(color < 0) or np.any(color > 1):
            raise InvalidArgumentError("color must be RGB in [0, 1]")
        if self.shape is Shape.BOX and min(self.half_extents) <= 0:
            raise InvalidArgumentError("box extents must be positive")
        if self.shape is Shape.SPHERE and not self.radius > 0:
            raise InvalidArgumentError("sphere radius must be positive")
        if self.shape is Shape.HALF_SPACE:
            n = np.asarray(self.normal, dtype=np.float64)
            norm = np.linalg.norm(n)
            if norm == 0.0:
                raise InvalidArgumentError("half-space normal must be non-zero")
            object.__setattr__(self, "normal", tuple(float(c) for c in n / norm))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Closed membership test for (N, 3) points."""
        if self.shape is Shape.BOX:
            c = np.asarray(self.center)
            h = np.asarray(self.half_extents)
            return np.all(np.abs(points - c) <= h, axis=-1)
        if self.shape is Shape.SPHERE:
            c = np.asarray(self.center)
            return np.sum((points - c) ** 2, axis=-1) <= self.radius**2
        return (points - np.asarray(self.point)) @ np.asarray(self.normal) <= 0.0

    def entry(self, origins: np.ndarray, directions: np.ndarray) -> np.ndarray:
        """
        Smallest t >= 0 at which each ray is inside the primitive.

        Args:
            origins: (N, 3).
            directions: (N, 3) unit vectors.

        Returns:
            (N,) entry distances, inf for rays that never enter.
        """
        if self.shape is Shape.BOX:
            return _box_entry(origins, directions, self.center, self.half_extents)
        if self.shape is Shape.SPHERE:
            return _sphere_entry(origins, directions, self.center, self.radius)
        return _half_space_entry(origins, directions, self.point, self.normal)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "shape": self.shape.value,
            "density": self.density,
            "color": list(self.color),
        }
        if self.shape is Shape.BOX:
            data.update(center=list(self.center), half_extents=list(self.half_extents))
        elif self.shape is Shape.SPHERE:
            data.update(center=list(self.center), radius=self.radius)
        else:
            data.update(point=list(self.point), normal=list(self.normal))
        if self.category is not None:
            data["category"] = self.category
        return data


def _box_entry(origins, directions, center, half_extents) -> np.ndarray:
    lo = np.asarray(center) - np.asarray(half_extents)
    hi = np.asarray(center) + np.asarray(half_extents)
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - origins) / directions
        t2 = (hi - origins) / directions
    parallel = directions == 0.0
    inside_slab = (origins >= lo) & (origins <= hi)
    t_near = np.where(parallel, np.where(inside_slab, -np.inf, np.inf), np.minimum(t1, t2))
    t_far = np.where(parallel, np.where(inside_slab, np.inf, -np.inf), np.maximum(t1, t2))
    t_enter = np.max(t_near, axis=-1)
    t_exit = np.min(t_far, axis=-1)
    hit = (t_exit >= np.maximum(t_enter, 0.0)) & (t_enter <= t_exit)
    return np.where(hit, np.maximum(t_enter, 0.0), np.inf)


def _sphere_entry(origins, directions, center, radius) -> np.ndarray:
    oc = origins - np.asarray(center)
    b = np.sum(oc * directions, axis=-1)
    c = np.sum(oc * oc, axis=-1) - radius * radius
    disc = b * b - c
    root = np.sqrt(np.maximum(disc, 0.0))
    t0 = -b - root
    t1 = -b + root
    hit = (disc >= 0.0) & (t1 >= 0.0)
    return np.where(hit, np.maximum(t0, 0.0), np.inf)


def _half_space_entry(origins, directions, point, normal) -> np.ndarray:
    n = np.asarray(normal)
    s0 = (origins - np.asarray(point)) @ n
    dn = directions @ n
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dn < 0.0, -s0 / dn, np.inf)
    return np.where(s0 <= 0.0, 0.0, t)


@dataclass(frozen=True, eq=False)
class AnalyticField(DensityField):
    """A set of primitives with per-primitive density and colour."""

    primitives: tuple[Primitive, ...] = ()
    background: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "primitives", tuple(self.primitives))
        background = np.asarray(self.background, dtype=np.float64).reshape(3)
        object.__setattr__(self, "background", background)

    def _densities(self, points: np.ndarray) -> np.ndarray:
        """(K, N) density of each primitive at each point, 0 outside."""
        flat = points.reshape(-1, 3)
        if not self.primitives:
            return np.zeros((0, flat.shape[0]))
        return np.stack(
            [np.where(p.contains(flat), p.density, 0.0) for p in self.primitives]
        )

    def sigma(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        dens = self._densities(points)
        if dens.shape[0] == 0:
            return np.zeros(points.shape[:-1])
        return dens.max(axis=0).reshape(points.shape[:-1])

    def color(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        dens = self._densities(points)
        n = dens.shape[1]
        out = np.broadcast_to(self.background, (n, 3)).copy()
        if dens.shape[0]:
            best = dens.argmax(axis=0)
            inside = dens.max(axis=0) > 0.0
            colors = np.asarray([p.color for p in self.primitives], dtype=np.float64)
            out[inside] = colors[best[inside]]
        return out.reshape(points.shape[:-1] + (3,))

    def first_hits(
        self, origins: np.ndarray, directions: np.ndarray, threshold: float = 0.0
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Batched first-hit distances.

        Args:
            origins: (N, 3) ray origins.
            directions: (N, 3) unit directions.
            threshold: Only primitives with density above this count as surfaces.

        Returns:
            (distances, index): distances are inf and index is -1 for misses.
        """
        origins = np.asarray(origins, dtype=np.float64).reshape(-1, 3)
        directions = np.asarray(directions, dtype=np.float64).reshape(-1, 3)
        n = origins.shape[0]
        best = np.full(n, np.inf)
        index = np.full(n, -1, dtype=np.int64)
        for k, prim in enumerate(self.primitives):
            if not prim.density > threshold:
                continue
            t = prim.entry(origins, directions)
            closer = t < best
            best[closer] = t[closer]
            index[closer] = k
        return best, index

    def to_dict(self) -> dict[str, Any]:
        return {
            "primitives": [p.to_dict() for p in self.primitives],
            "background": self.background.tolist(),
        }


def analytic_first_hit(field: AnalyticField, ray: Ray, threshold: float = 0.0) -> float | None:
    """
    Distance at which a ray first enters a hard surface.

    Args:
        field: Analytic field.
        ray: Query ray.
        threshold: Minimum density for a primitive to count as a surface.

    Returns:
        Smallest t >= 0 inside a primitive, or None if the ray misses.
    """
    t, _ = field.first_hits(ray.origin[None, :], ray.direction[None, :], threshold)
    return None if np.isinf(t[0]) else float(t[0])


def primitive_from_dict(data: dict[str, Any], where: str = "primitives[0]") -> Primitive:
    """
    Build a primitive from its JSON form (see Primitive.to_dict).

    Raises:
        DescriptorParseError: With the dotted field path on malformed input.
    """
    if not isinstance(data, dict):
        raise DescriptorParseError("primitive must be an object", field=where)
    if "shape" not in data:
        raise DescriptorParseError("missing 'shape'", field=f"{where}.shape")
    try:
        shape = Shape(data["shape"])
    except ValueError as e:
        raise DescriptorParseError(
            f"unknown shape '{data['shape']}'", field=f"{where}.shape"
        ) from e
    required = _SHAPE_KEYS[shape]
    for key in required:
        if key not in data:
            raise DescriptorParseError(f"missing '{key}'", field=f"{where}.{key}")
    try:
        kwargs: dict[str, Any] = {
            "shape": shape,
            "density": float(data.get("density", OPAQUE_DENSITY)),
            "color": tuple(float(c) for c in data.get("color", (1.0, 1.0, 1.0))),
            "category": data.get("category"),
        }
        for key in required:
            if key == "radius":
                kwargs[key] = float(data[key])
            else:
                kwargs[key] = tuple(float(c) for c in data[key])
        return Primitive(**kwargs)
    except (InvalidArgumentError, TypeError, ValueError) as e:
        raise DescriptorParseError(str(e), field=where) from e
