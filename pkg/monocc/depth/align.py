"""Inverse depth alignment.

Pseudo depth D_p is corrected by an additive residual in inverse-depth space:

    1 / D̂(x) = 1 / D_p(x) + r(x) + ε

where r is bilinearly interpolated from a coarse control grid. The grid is
fitted to sparse metric targets by preconditioned gradient descent on a
Huber-smoothed L1 loss plus a quadratic smoothness penalty.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from monocc.errors import (
    FormatError,
    InvalidArgumentError,
    NumericFailureError,
)
from monocc.log import log
from monocc.maps import DepthMap

MAX_BACKTRACKS = 60


def interpolation_matrix(num_pixels: int, num_controls: int) -> np.ndarray:
    """
    (num_pixels, num_controls) linear interpolation weights along one axis.

    Control j sits at pixel coordinate j * (num_pixels - 1) / (num_controls - 1),
    so the first and last controls coincide with the border pixels.
    """
    if num_controls < 2:
        raise InvalidArgumentError("need at least two controls per axis")
    return _axis_weights(np.arange(num_pixels, dtype=np.float64), num_pixels, num_controls)


def _axis_weights(coords: np.ndarray, num_pixels: int, num_controls: int) -> np.ndarray:
    span = max(num_pixels - 1, 1)
    s = coords * (num_controls - 1) / span
    j0 = np.clip(np.floor(s).astype(np.int64), 0, num_controls - 2)
    f = s - j0
    weights = np.zeros((coords.size, num_controls))
    rows = np.arange(coords.size)
    weights[rows, j0] = 1.0 - f
    weights[rows, j0 + 1] += f
    return weights


@dataclass(frozen=True, eq=False)
class ResidualField:
    """Residual inverse depth (1/m) on a (gh, gw) control grid."""

    control: np.ndarray

    def __post_init__(self):
        control = np.array(self.control, dtype=np.float64)
        if control.ndim != 2 or min(control.shape) < 2:
            raise InvalidArgumentError(
                "control grid must be 2-D with at least 2 x 2 entries",
                shape=list(control.shape),
            )
        if not np.all(np.isfinite(control)):
            raise InvalidArgumentError("control values must be finite")
        control.setflags(write=False)
        object.__setattr__(self, "control", control)

    @classmethod
    def zeros(cls, grid_height: int, grid_width: int) -> "ResidualField":
        return cls(np.zeros((grid_height, grid_width)))

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.control.shape

    def evaluate(self, height: int, width: int) -> np.ndarray:
        """Bilinear upsampling to an (height, width) raster."""
        gh, gw = self.grid_shape
        return interpolation_matrix(height, gh) @ self.control @ interpolation_matrix(width, gw).T

    def save(self, path: str | Path) -> Path:
        """Write ``<path>.bin`` (float64-le, row-major) and ``<path>.json``."""
        base = Path(path).with_suffix("")
        base.parent.mkdir(parents=True, exist_ok=True)
        self.control.astype("<f8").tofile(base.with_suffix(".bin"))
        sidecar_path = base.with_suffix(".json")
        with open(sidecar_path, "w", encoding="utf-8") as f:
            json.dump(
                {"grid": list(self.grid_shape), "dtype": "float64-le", "order": "C(row,col)"},
                f,
                indent=2,
                sort_keys=True,
            )
        return sidecar_path

    @classmethod
    def load(cls, path: str | Path) -> "ResidualField":
        base = Path(path).with_suffix("")
        try:
            with open(base.with_suffix(".json"), "r", encoding="utf-8") as f:
                sidecar = json.load(f)
            shape = tuple(int(n) for n in sidecar["grid"])
            values = np.fromfile(base.with_suffix(".bin"), dtype="<f8")
            return cls(values.reshape(shape))
        except (KeyError, ValueError, json.JSONDecodeError) as e:
            raise FormatError(f"malformed residual file {base}: {e}") from e


def refine_depth(
    pseudo: DepthMap, residual: ResidualField | np.ndarray, epsilon: float
) -> DepthMap:
    """
    Apply an inverse-depth residual to a pseudo depth map.

    Args:
        pseudo: Pseudo depth D_p.
        residual: Control grid, or a full-resolution (H, W) residual raster.
        epsilon: Denominator stabilizer, > 0.

    Returns:
        D̂ = 1 / (1/D_p + r + ε); invalid where D_p is invalid or the
        denominator is not positive.
    """
    if not epsilon > 0:
        raise InvalidArgumentError("epsilon must be positive", epsilon=epsilon)
    if isinstance(residual, ResidualField):
        r = residual.evaluate(pseudo.height, pseudo.width)
    else:
        r = np.asarray(residual, dtype=np.float64)
        if r.shape != pseudo.shape:
            raise InvalidArgumentError(
                "residual raster size does not match the depth map",
                residual=list(r.shape),
                depth=list(pseudo.shape),
            )
    with np.errstate(divide="ignore", invalid="ignore"):
        denom = 1.0 / pseudo.values + r + epsilon
        refined = np.where(denom > 0, 1.0 / denom, np.nan)
    return DepthMap(refined)


@dataclass(frozen=True, eq=False)
class AlignmentTargets:
    """Sparse metric depth targets at integer pixels."""

    u: np.ndarray
    v: np.ndarray
    depth: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=np.int64).reshape(-1)
        v = np.asarray(self.v, dtype=np.int64).reshape(-1)
        depth = np.asarray(self.depth, dtype=np.float64).reshape(-1)
        if not (u.size == v.size == depth.size):
            raise InvalidArgumentError("target arrays must have equal length")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "depth", depth)

    def __len__(self) -> int:
        return int(self.depth.size)

    @classmethod
    def from_depth_map(
        cls,
        depth: DepthMap,
        fraction: float = 1.0,
        rng: np.random.Generator | None = None,
    ) -> "AlignmentTargets":
        """
        Use the valid pixels of a depth map as targets.

        Args:
            depth: Metric depth (e.g. projected LiDAR).
            fraction: Share of valid pixels kept, drawn without replacement.
            rng: Generator for the subset; required when fraction < 1.
        """
        rows, cols = np.nonzero(depth.valid)
        if fraction < 1.0:
            if rng is None:
                raise InvalidArgumentError("a generator is needed to subsample targets")
            keep = max(1, int(round(fraction * rows.size)))
            pick = np.sort(rng.choice(rows.size, size=keep, replace=False))
            rows, cols = rows[pick], cols[pick]
        return cls(u=cols, v=rows, depth=depth.values[rows, cols])


@dataclass(frozen=True, eq=False)
class AlignmentProblem:
    """Everything the objective needs, precomputed per target."""

    inv_pseudo: np.ndarray  # (T,) 1 / D_p at targets
    target_depth: np.ndarray  # (T,)
    row_weights: np.ndarray  # (T, gh)
    col_weights: np.ndarray  # (T, gw)
    epsilon: float = 1e-6
    huber_delta: float = 1e-3
    smoothness: float = 1e-2

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.row_weights.shape[1], self.col_weights.shape[1]

    @classmethod
    def build(
        cls,
        pseudo: DepthMap,
        targets: AlignmentTargets,
        grid_shape: tuple[int, int],
        epsilon: float = 1e-6,
        huber_delta: float = 1e-3,
        smoothness: float = 1e-2,
    ) -> "AlignmentProblem":
        """
        Precompute interpolation weights for the targets.

        Raises:
            InvalidArgumentError: If a target lies outside the image, or no
                target has both a valid pseudo depth and a positive depth.
        """
        if not epsilon > 0:
            raise InvalidArgumentError("epsilon must be positive", epsilon=epsilon)
        if not huber_delta > 0:
            raise InvalidArgumentError("huber delta must be positive")
        gh, gw = grid_shape
        if gh < 2 or gw < 2:
            raise InvalidArgumentError("control grid needs at least 2 x 2 entries")
        inside = (
            (targets.u >= 0)
            & (targets.u < pseudo.width)
            & (targets.v >= 0)
            & (targets.v < pseudo.height)
        )
        if not np.all(inside):
            raise InvalidArgumentError("alignment targets lie outside the image")
        dp = pseudo.values[targets.v, targets.u]
        keep = np.isfinite(dp) & np.isfinite(targets.depth) & (targets.depth > 0)
        if not keep.any():
            raise InvalidArgumentError("no valid alignment targets")
        u = targets.u[keep].astype(np.float64)
        v = targets.v[keep].astype(np.float64)
        return cls(
            inv_pseudo=1.0 / dp[keep],
            target_depth=targets.depth[keep],
            row_weights=_axis_weights(v, pseudo.height, gh),
            col_weights=_axis_weights(u, pseudo.width, gw),
            epsilon=epsilon,
            huber_delta=huber_delta,
            smoothness=smoothness,
        )


def _smoothness(grid: np.ndarray, weight: float) -> tuple[float, np.ndarray]:
    dv = np.diff(grid, axis=0)
    du = np.diff(grid, axis=1)
    value = weight * (np.sum(dv * dv) + np.sum(du * du))
    grad = np.zeros_like(grid)
    grad[1:, :] += 2.0 * weight * dv
    grad[:-1, :] -= 2.0 * weight * dv
    grad[:, 1:] += 2.0 * weight * du
    grad[:, :-1] -= 2.0 * weight * du
    return float(value), grad


def alignment_objective(grid: np.ndarray, problem: AlignmentProblem) -> tuple[float, np.ndarray]:
    """
    Loss and analytic gradient with respect to the control grid.

    loss = mean_t huber(D̂_t - D_t) + λ Σ (neighbour differences)^2, with
    huber(e) = e^2 / (2δ) for |e| <= δ and |e| - δ/2 otherwise. The loss is
    +inf when some target denominator is not positive.
    """
    grid = np.asarray(grid, dtype=np.float64)
    r = np.einsum("ta,ab,tb->t", problem.row_weights, grid, problem.col_weights)
    denom = problem.inv_pseudo + r + problem.epsilon
    if np.any(denom <= 0):
        return float("inf"), np.zeros_like(grid)
    refined = 1.0 / denom
    e = refined - problem.target_depth
    delta = problem.huber_delta
    small = np.abs(e) <= delta
    data = np.where(small, e * e / (2.0 * delta), np.abs(e) - 0.5 * delta)
    slope = np.where(small, e / delta, np.sign(e))
    # dD̂/dr = -D̂^2
    g = -slope * refined * refined / e.size
    grad = (problem.row_weights * g[:, None]).T @ problem.col_weights
    smooth, smooth_grad = _smoothness(grid, problem.smoothness)
    return float(data.mean()) + smooth, grad + smooth_grad


def _preconditioner(problem: AlignmentProblem) -> np.ndarray:
    """Inverse diagonal scaling: target weight density, or regularizer curvature without targets."""
    gh, gw = problem.grid_shape
    density = (problem.row_weights.T @ problem.col_weights) / problem.inv_pseudo.size
    neighbours = np.full((gh, gw), 4.0)
    neighbours[[0, -1], :] -= 1.0
    neighbours[:, [0, -1]] -= 1.0
    diag = np.where(density > 0, density, 2.0 * problem.smoothness * neighbours)
    return np.divide(1.0, diag, out=np.zeros_like(diag), where=diag > 0)


@dataclass
class FitResult:
    """Outcome of fit_residual."""

    field: ResidualField
    loss: float
    history: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "loss": self.loss,
            "initial_loss": self.history[0] if self.history else self.loss,
            "iterations": self.iterations,
            "converged": self.converged,
            "grid": list(self.field.grid_shape),
        }


def fit_residual(
    pseudo: DepthMap,
    targets: AlignmentTargets,
    grid_shape: tuple[int, int] = (12, 40),
    epsilon: float = 1e-6,
    config=None,
) -> FitResult:
    """
    Fit the residual control grid to metric targets.

    Args:
        pseudo: Pseudo depth D_p.
        targets: Metric depth targets.
        grid_shape: Control grid (gh, gw).
        epsilon: Denominator stabilizer.
        config: AlignConfig with optimizer settings; defaults when None.

    Returns:
        FitResult with the fitted field, final loss and loss history.

    Raises:
        InvalidArgumentError: Without valid targets.
        NumericFailureError: If the loss becomes NaN.
    """
    from monocc.config.run import AlignConfig

    config = config or AlignConfig()
    problem = AlignmentProblem.build(
        pseudo,
        targets,
        grid_shape,
        epsilon=epsilon,
        huber_delta=config.huber_delta,
        smoothness=config.smoothness,
    )
    precond = _preconditioner(problem)
    grid = np.zeros(grid_shape)
    loss, grad = alignment_objective(grid, problem)
    if np.isnan(loss):
        raise NumericFailureError("alignment loss is NaN at initialization")
    history = [loss]
    step = config.initial_step
    converged = False
    iterations = 0

    for iterations in range(1, config.max_iterations + 1):
        direction = -precond * grad
        slope = float(np.sum(grad * direction))
        if slope >= 0.0:
            converged = True
            break
        accepted = False
        for _ in range(MAX_BACKTRACKS):
            candidate = grid + step * direction
            new_loss, new_grad = alignment_objective(candidate, problem)
            if np.isnan(new_loss):
                raise NumericFailureError("alignment loss became NaN", iteration=iterations)
            if new_loss <= loss + config.armijo * step * slope:
                accepted = True
                break
            step *= config.backtrack
        if not accepted:
            converged = True
            break
        improvement = loss - new_loss
        grid, loss, grad = candidate, new_loss, new_grad
        history.append(loss)
        step /= config.backtrack
        if improvement < config.tolerance:
            converged = True
            break

    log("ALIGN", f"{iterations} iterations, loss {history[0]:.6g} -> {loss:.6g}")
    return FitResult(
        field=ResidualField(grid),
        loss=loss,
        history=history,
        iterations=iterations,
        converged=converged,
    )


@dataclass(frozen=True)
class ResidualSummary:
    """Distribution summary of one residual parameterization."""

    mean: float
    variance: float
    min: float
    max: float
    quantiles: dict[str, float]
    histogram: list[int]
    bin_edges: list[float]

    @property
    def range(self) -> float:
        return self.max - self.min

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean,
            "variance": self.variance,
            "min": self.min,
            "max": self.max,
            "range": self.range,
            "quantiles": self.quantiles,
            "histogram": self.histogram,
            "bin_edges": self.bin_edges,
        }


def _summarize(values: np.ndarray, bins: int) -> ResidualSummary:
    counts, edges = np.histogram(values, bins=bins)
    levels = (0.05, 0.25, 0.5, 0.75, 0.95)
    return ResidualSummary(
        mean=float(values.mean()),
        variance=float(values.var()),
        min=float(values.min()),
        max=float(values.max()),
        quantiles={f"q{int(q * 100):02d}": float(np.quantile(values, q)) for q in levels},
        histogram=counts.tolist(),
        bin_edges=edges.tolist(),
    )


def residual_statistics(
    pseudo: DepthMap, gt: DepthMap, bins: int = 32
) -> dict[str, ResidualSummary]:
    """
    Compare depth and inverse-depth residuals between pseudo and GT depth.

    Returns:
        ``{"depth": summary of D_gt - D_p, "inverse": summary of 1/D_gt - 1/D_p}``.

    Raises:
        InvalidArgumentError: If the maps differ in size or share no valid pixel.
    """
    if pseudo.shape != gt.shape:
        raise InvalidArgumentError("depth maps differ in size")
    both = pseudo.valid & gt.valid
    if not both.any():
        raise InvalidArgumentError("pseudo and ground-truth depth share no valid pixel")
    dp = pseudo.values[both]
    dg = gt.values[both]
    return {
        "depth": _summarize(dg - dp, bins),
        "inverse": _summarize(1.0 / dg - 1.0 / dp, bins),
    }


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
