"""Inverse depth alignment of pseudo depth maps."""

from monocc.depth.align import (
    AlignmentProblem,
    AlignmentTargets,
    FitResult,
    ResidualField,
    ResidualSummary,
    alignment_objective,
    fit_residual,
    interpolation_matrix,
    refine_depth,
    residual_statistics,
)

__all__ = [
    "ResidualField",
    "AlignmentTargets",
    "AlignmentProblem",
    "FitResult",
    "ResidualSummary",
    "interpolation_matrix",
    "refine_depth",
    "alignment_objective",
    "fit_residual",
    "residual_statistics",
]
