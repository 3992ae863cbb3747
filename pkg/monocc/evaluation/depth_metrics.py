"""Monocular depth error metrics."""

from dataclasses import asdict, dataclass

import numpy as np

from monocc.errors import EmptySupportError, InvalidArgumentError
from monocc.maps import DepthMap

MIN_DEPTH = 1e-3
MAX_DEPTH = 80.0


@dataclass(frozen=True)
class DepthEvalReport:
    abs_rel: float
    sq_rel: float
    rmse: float
    rmse_log: float
    delta1: float
    delta2: float
    delta3: float
    scaling: str
    ratio: float
    pixels: int

    def to_dict(self) -> dict:
        return asdict(self)


def compute_errors(gt: np.ndarray, pred: np.ndarray) -> tuple[float, ...]:
    """Abs Rel, Sq Rel, RMSE, RMSE log and δ < 1.25^i accuracies."""
    thresh = np.maximum(gt / pred, pred / gt)
    a1 = (thresh < 1.25).mean()
    a2 = (thresh < 1.25**2).mean()
    a3 = (thresh < 1.25**3).mean()

    rmse = np.sqrt(((gt - pred) ** 2).mean())
    rmse_log = np.sqrt(((np.log(gt) - np.log(pred)) ** 2).mean())

    abs_rel = np.mean(np.abs(gt - pred) / gt)
    sq_rel = np.mean(((gt - pred) ** 2) / gt)
    return tuple(float(x) for x in (abs_rel, sq_rel, rmse, rmse_log, a1, a2, a3))


def depth_metrics(
    pred: DepthMap,
    gt: DepthMap,
    cap: float = MAX_DEPTH,
    scaling: str = "median",
    min_depth: float = MIN_DEPTH,
) -> DepthEvalReport:
    """
    Evaluate a predicted depth map against ground truth.

    Pixels count when gt lies in (0, cap] and pred is valid. With median
    scaling, pred is multiplied by median(gt) / median(pred) first; pred is
    then clamped to [min_depth, cap].

    Args:
        pred: Predicted depth.
        gt: Ground-truth depth.
        cap: Maximum evaluated depth (meters).
        scaling: ``"none"`` or ``"median"``.
        min_depth: Lower clamp for predictions.

    Returns:
        DepthEvalReport.

    Raises:
        EmptySupportError: If no pixel is valid in both maps.
    """
    if pred.shape != gt.shape:
        raise InvalidArgumentError("depth maps differ in size")
    if not cap > 0:
        raise InvalidArgumentError("cap must be positive", cap=cap)
    if scaling not in ("none", "median"):
        raise InvalidArgumentError("scaling must be 'none' or 'median'", scaling=scaling)
    with np.errstate(invalid="ignore"):
        mask = gt.valid & pred.valid & (gt.values <= cap)
    pixels = int(mask.sum())
    if pixels == 0:
        raise EmptySupportError("predicted and ground-truth depth share no valid pixel")
    g = gt.values[mask]
    p = pred.values[mask]

    ratio = 1.0
    if scaling == "median":
        ratio = float(np.median(g) / np.median(p))
        p = p * ratio
    p = np.clip(p, min_depth, cap)

    abs_rel, sq_rel, rmse, rmse_log, a1, a2, a3 = compute_errors(g, p)
    return DepthEvalReport(
        abs_rel=abs_rel,
        sq_rel=sq_rel,
        rmse=rmse,
        rmse_log=rmse_log,
        delta1=a1,
        delta2=a2,
        delta3=a3,
        scaling=scaling,
        ratio=ratio,
        pixels=pixels,
    )
