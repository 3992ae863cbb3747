"""Density fields standing in for a learned radiance field."""

from monocc.field.analytic import (
    OPAQUE_DENSITY,
    AnalyticField,
    Primitive,
    Shape,
    analytic_first_hit,
    primitive_from_dict,
)
from monocc.field.base import DensityField, color_at, sigma_at
from monocc.field.grid import GridField

__all__ = [
    "DensityField",
    "AnalyticField",
    "GridField",
    "Primitive",
    "Shape",
    "OPAQUE_DENSITY",
    "sigma_at",
    "color_at",
    "analytic_first_hit",
    "primitive_from_dict",
]
