"""Sampler efficiency: valid rays per iteration and their share on crucial instances."""

from dataclasses import asdict, dataclass

import numpy as np

from monocc.config.strategies import SamplingStrategyTable
from monocc.errors import InvalidArgumentError
from monocc.sampler.instances import InstanceMeta
from monocc.sampler.patches import PatchSet


@dataclass(frozen=True)
class SamplerEfficiency:
    """
    Attributes:
        n_v: Mean unique pixels covered per run.
        n_vc: Mean covered pixels inside the crucial mask per run.
        psi_v: Mean per-run ratio n_vc / n_v, in percent.
        runs: Number of runs averaged.
    """

    n_v: float
    n_vc: float
    psi_v: float
    runs: int

    def to_dict(self) -> dict:
        return asdict(self)


def crucial_mask(
    instances: list[InstanceMeta], table: SamplingStrategyTable, width: int, height: int
) -> np.ndarray:
    """(H, W) union of the boxes of Gaussian-strategy instances."""
    mask = np.zeros((height, width), dtype=bool)
    for inst in instances:
        if table.is_gaussian(inst.category):
            mask |= inst.bbox_mask(width, height)
    return mask


def sampler_efficiency(
    runs: list[PatchSet], crucial_masks: np.ndarray | list[np.ndarray]
) -> SamplerEfficiency:
    """
    Average coverage statistics over sampling runs.

    Args:
        runs: One PatchSet per iteration.
        crucial_masks: One (H, W) mask shared by all runs, or one per run.

    Returns:
        SamplerEfficiency.

    Raises:
        InvalidArgumentError: On an empty run list, a mask count that does not
            match the runs, or a mask whose size differs from its run's image.
    """
    if not runs:
        raise InvalidArgumentError("need at least one run")
    if isinstance(crucial_masks, np.ndarray) and crucial_masks.ndim == 2:
        masks = [crucial_masks] * len(runs)
    else:
        masks = list(crucial_masks)
    if len(masks) != len(runs):
        raise InvalidArgumentError(
            "one crucial mask per run is required", runs=len(runs), masks=len(masks)
        )

    n_v = np.empty(len(runs))
    n_vc = np.empty(len(runs))
    for i, (run, mask) in enumerate(zip(runs, masks)):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (run.height, run.width):
            raise InvalidArgumentError(
                "crucial mask size does not match the image",
                mask_shape=list(mask.shape),
                image_shape=[run.height, run.width],
            )
        covered = run.coverage_mask()
        n_v[i] = covered.sum()
        n_vc[i] = (covered & mask).sum()

    ratios = np.divide(n_vc, n_v, out=np.zeros_like(n_v), where=n_v > 0)
    return SamplerEfficiency(
        n_v=float(n_v.mean()),
        n_vc=float(n_vc.mean()),
        psi_v=float(100.0 * ratios.mean()),
        runs=len(runs),
    )
