"""Trilinear voxel-grid density field.

Values sit on a node lattice spanning ``bounds`` inclusively: node i along
an axis is at ``lo + i * (hi - lo) / (n - 1)``. Queries outside the bounds
return zero density and the background colour.

On disk a grid is a flat little-endian float32 file in C order over
(x, y, z) plus a JSON sidecar holding resolution and bounds.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import FormatError, InvalidArgumentError
from monocc.field.base import DensityField

SNAP_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class GridField(DensityField):
    """Densities (and optional colours) on a regular node lattice."""

    values: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    colors: np.ndarray | None = None
    background: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        lo = np.asarray(self.lo, dtype=np.float64).reshape(3)
        hi = np.asarray(self.hi, dtype=np.float64).reshape(3)
        if values.ndim != 3 or min(values.shape) < 2:
            raise InvalidArgumentError("grid values need shape (nx, ny, nz), each >= 2")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidArgumentError("grid densities must be finite and non-negative")
        if not np.all(hi > lo):
            raise InvalidArgumentError("grid bounds are degenerate")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.colors is not None:
            colors = np.array(self.colors, dtype=np.float64)
            if colors.shape != values.shape + (3,):
                raise InvalidArgumentError("grid colors need shape (nx, ny, nz, 3)")
            object.__setattr__(self, "colors", np.clip(colors, 0.0, 1.0))
        background = np.asarray(self.background, dtype=np.float64).reshape(3)
        object.__setattr__(self, "background", background)

    @property
    def resolution(self) -> tuple[int, int, int]:
        return tuple(int(n) for n in self.values.shape)

    def _locate(self, points: np.ndarray):
        flat = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        n = np.asarray(self.values.shape)
        inside = np.all((flat >= self.lo) & (flat <= self.hi), axis=-1)
        g = (flat - self.lo) / (self.hi - self.lo) * (n - 1)
        nearest = np.round(g)
        g = np.where(np.abs(g - nearest) < SNAP_TOLERANCE, nearest, g)
        i0 = np.clip(np.floor(g), 0, n - 2).astype(np.int64)
        f = np.clip(g - i0, 0.0, 1.0)
        return flat, inside, i0, f

    def _interpolate(self, table: np.ndarray, i0: np.ndarray, f: np.ndarray) -> np.ndarray:
        out = 0.0
        for dx in (0, 1):
            wx = f[:, 0] if dx else 1.0 - f[:, 0]
            for dy in (0, 1):
                wy = f[:, 1] if dy else 1.0 - f[:, 1]
                for dz in (0, 1):
                    wz = f[:, 2] if dz else 1.0 - f[:, 2]
                    w = wx * wy * wz
                    corner = table[i0[:, 0] + dx, i0[:, 1] + dy, i0[:, 2] + dz]
                    out = out + (w[:, None] * corner if corner.ndim == 2 else w * corner)
        return out

    def sigma(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        flat, inside, i0, f = self._locate(points)
        out = np.where(inside, self._interpolate(self.values, i0, f), 0.0)
        return out.reshape(points.shape[:-1])

    def color(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        flat, inside, i0, f = self._locate(points)
        out = np.broadcast_to(self.background, flat.shape).copy()
        if self.colors is not None and np.any(inside):
            out[inside] = self._interpolate(self.colors, i0[inside], f[inside])
        return out.reshape(points.shape[:-1] + (3,))

    @classmethod
    def from_field(
        cls, source: DensityField, lo, hi, resolution: tuple[int, int, int]
    ) -> "GridField":
        """
        Discretize any density field onto a node lattice.

        Args:
            source: Field to sample.
            lo: Lower bounds (meters).
            hi: Upper bounds (meters).
            resolution: Nodes per axis (nx, ny, nz).
        """
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        axes = [np.linspace(lo[i], hi[i], resolution[i]) for i in range(3)]
        nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return cls(
            values=source.sigma(nodes),
            lo=lo,
            hi=hi,
            colors=source.color(nodes),
            background=source.background,
        )

    def save(self, path: str | Path) -> Path:
        """
        Write ``<path>.bin`` (+ ``<path>.colors.bin``) and ``<path>.json``.

        Returns:
            Path of the JSON sidecar.
        """
        base = Path(path).with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        self.values.astype("<f4").tofile(base.with_suffix(".bin"))
        sidecar: dict[str, Any] = {
            "resolution": list(self.resolution),
            "bounds": {"lo": self.lo.tolist(), "hi": self.hi.tolist()},
            "dtype": "float32-le",
            "order": "C(x,y,z)",
            "background": self.background.tolist(),
            "colors": self.colors is not None,
        }
        if self.colors is not None:
            self.colors.astype("<f4").tofile(base.with_name(base.name + ".colors.bin"))
        sidecar_path = base.with_suffix(".json")
        with open(sidecar_path, "w", encoding="utf-8") as f:
            json.dump(sidecar, f, indent=2, sort_keys=True)
        return sidecar_path

    @classmethod
    def load(cls, path: str | Path) -> "GridField":
        """Load a grid saved with :meth:`save` (path to the sidecar or its stem)."""
        base = Path(path).with_suffix("")
        try:
            with open(base.with_suffix(".json"), "r", encoding="utf-8") as f:
                sidecar = json.load(f)
            resolution = tuple(int(n) for n in sidecar["resolution"])
            values = np.fromfile(base.with_suffix(".bin"), dtype="<f4")
            colors = None
            if sidecar.get("colors"):
                colors = np.fromfile(base.with_name(base.name + ".colors.bin"), dtype="<f4")
                colors = colors.reshape(resolution + (3,))
            return cls(
                values=values.reshape(resolution),
                lo=sidecar["bounds"]["lo"],
                hi=sidecar["bounds"]["hi"],
                colors=colors,
                background=sidecar.get("background", [0.0, 0.0, 0.0]),
            )
        except (KeyError, ValueError, json.JSONDecodeError) as e:
            raise FormatError(f"malformed grid file {base}: {e}") from e
