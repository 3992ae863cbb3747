"""Density field interface.

A density field maps world points to a non-negative density sigma (1/m) and
an RGB radiance in [0, 1]. Implementations are immutable after construction
and are queried in batches.
"""

from abc import ABC, abstractmethod

import numpy as np

from monocc.errors import InvalidArgumentError


class DensityField(ABC):
    """Queryable scalar density plus colour."""

    background: np.ndarray

    @abstractmethod
    def sigma(self, points: np.ndarray) -> np.ndarray:
        """Densities for (..., 3) points, shape (...)."""

    @abstractmethod
    def color(self, points: np.ndarray) -> np.ndarray:
        """RGB for (..., 3) points, shape (..., 3)."""


def _check_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(p)):
        raise InvalidArgumentError("query point must be finite")
    return p


def sigma_at(field: DensityField, p) -> float:
    """Density at a single point (1/m)."""
    return float(field.sigma(_check_point(p)[None, :])[0])


def color_at(field: DensityField, p) -> np.ndarray:
    """RGB at a single point."""
    return field.color(_check_point(p)[None, :])[0]
