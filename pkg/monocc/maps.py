"""Raster value types shared by alignment, losses and evaluation."""

from dataclasses import dataclass

import numpy as np

from monocc.errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class DepthMap:
    """Per-pixel depth in meters, NaN where invalid."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise InvalidArgumentError("depth map must be 2-D", shape=list(values.shape))
        finite = np.isfinite(values)
        if np.any(values[finite] <= 0):
            raise InvalidArgumentError("finite depths must be positive")
        values[~finite] = np.nan
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_raw(cls, values: np.ndarray) -> "DepthMap":
        """Build from a raw raster where non-positive or non-finite means invalid."""
        values = np.array(values, dtype=np.float64)
        values[~(np.isfinite(values) & (values > 0))] = np.nan
        return cls(values)

    @classmethod
    def invalid(cls, width: int, height: int) -> "DepthMap":
        return cls(np.full((height, width), np.nan))

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @property
    def valid(self) -> np.ndarray:
        return np.isfinite(self.values)

    def scaled(self, factor: float) -> "DepthMap":
        if not factor > 0:
            raise InvalidArgumentError("scale factor must be positive", factor=factor)
        return DepthMap(self.values * factor)

    def to_raw(self) -> np.ndarray:
        """float32 raster with 0 at invalid pixels."""
        return np.nan_to_num(self.values, nan=0.0).astype(np.float32)


@dataclass(frozen=True, eq=False)
class Image:
    """Linear RGB image, (H, W, 3) values in [0, 1]."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 3 or values.shape[2] != 3:
            raise InvalidArgumentError("image must be (H, W, 3)", shape=list(values.shape))
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("image values must be finite")
        if values.size and (values.min() < 0.0 or values.max() > 1.0):
            raise InvalidArgumentError("image values must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, width: int, height: int, value) -> "Image":
        return cls(np.broadcast_to(np.asarray(value, dtype=np.float64), (height, width, 3)))

    @property
    def height(self) -> int:
        return int(self.values.shape[0])

    @property
    def width(self) -> int:
        return int(self.values.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]
