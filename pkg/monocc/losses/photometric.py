"""Training losses: temporal alignment, depth and RGB reconstruction, total."""

import math
from dataclasses import asdict, dataclass

import numpy as np

from monocc.errors import EmptySupportError, InvalidArgumentError, NumericFailureError
from monocc.geometry.camera import CameraIntrinsics, ray_norms
from monocc.losses.warp import WarpResult
from monocc.maps import DepthMap, Image

SSIM_C1 = 0.01**2
SSIM_C2 = 0.03**2


@dataclass(frozen=True)
class LossWeights:
    """Loss weights: λ1 temporal, λ2 reconstruction, β1 SSIM, β2 L1."""

    lambda1: float = 1.0
    lambda2: float = 1.0
    beta1: float = 0.85
    beta2: float = 0.15

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not value >= 0:
                raise InvalidArgumentError(f"{name} must be non-negative", **{name: value})

    @classmethod
    def from_config(cls, config) -> "LossWeights":
        return cls(config.lambda1, config.lambda2, config.beta1, config.beta2)


def build_weight_mask(validity: np.ndarray, rho: np.ndarray | None = None) -> np.ndarray:
    """
    Per-pixel weight M = validity * (1 - ρ).

    Args:
        validity: (H, W) bool warp validity.
        rho: Optional (H, W) depth inconsistency in [0, 1]; 0 when omitted.
    """
    weights = np.asarray(validity, dtype=np.float64)
    if rho is None:
        return weights
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != weights.shape:
        raise InvalidArgumentError("inconsistency raster size differs from the mask")
    if np.any(~np.isfinite(rho)) or rho.min() < 0 or rho.max() > 1:
        raise InvalidArgumentError("inconsistency must lie in [0, 1]")
    return weights * (1.0 - rho)


def temporal_alignment_loss(
    target: Image, warp: WarpResult, mask: np.ndarray | None = None
) -> tuple[float, int]:
    """
    Weighted photometric error between a frame and its warped neighbour.

    Args:
        target: Target frame I_t.
        warp: Warp of the neighbouring frame into the target view.
        mask: (H, W) weights M; defaults to the warp validity.

    Returns:
        (loss, N) with loss = (1/N) Σ M |I_t - Î_t| (mean over channels) and
        N the count of valid pixels with M > 0.

    Raises:
        EmptySupportError: If N = 0.
    """
    if target.shape != warp.warped.shape:
        raise InvalidArgumentError("target and warped images differ in size")
    weights = build_weight_mask(warp.validity) if mask is None else np.asarray(mask, dtype=np.float64)
    if weights.shape != target.shape:
        raise InvalidArgumentError("mask size differs from the image")
    support = warp.validity & (weights > 0)
    n = int(support.sum())
    if n == 0:
        raise EmptySupportError("temporal alignment loss has no valid pixels")
    error = np.abs(target.values - warp.warped.values).mean(axis=-1)
    return float(np.sum(weights[support] * error[support]) / n), n


def depth_reconstruction_loss(
    rendered_distance: np.ndarray, depth: DepthMap, K: CameraIntrinsics
) -> tuple[float, int]:
    """
    Mean |D̂_r / ||K^-1 x̃|| - D̂| over pixels valid in both rasters.

    Args:
        rendered_distance: (H, W) distances along pixel rays, NaN where not
            rendered.
        depth: Predicted planar depth D̂.
        K: Intrinsics of the rendered view.

    Returns:
        (loss, M) with M the number of pixels entering the mean.

    Raises:
        EmptySupportError: If no pixel is valid in both.
    """
    rendered_distance = np.asarray(rendered_distance, dtype=np.float64)
    if rendered_distance.shape != depth.shape or depth.shape != K.shape:
        raise InvalidArgumentError("rendered distance, depth and intrinsics differ in size")
    support = np.isfinite(rendered_distance) & depth.valid
    m = int(support.sum())
    if m == 0:
        raise EmptySupportError("depth reconstruction loss has no valid pixels")
    planar = rendered_distance[support] / ray_norms(K)[support]
    return float(np.mean(np.abs(planar - depth.values[support]))), m


def _box3(x: np.ndarray) -> np.ndarray:
    """3 x 3 mean over the (H, W) axes of (..., H, W, C), reflect-padded."""
    h, w = x.shape[-3], x.shape[-2]
    mode = "reflect" if h > 1 and w > 1 else "edge"
    pad = [(0, 0)] * (x.ndim - 3) + [(1, 1), (1, 1), (0, 0)]
    p = np.pad(x, pad, mode=mode)
    total = np.zeros_like(x)
    for dv in range(3):
        for du in range(3):
            total += p[..., dv : dv + h, du : du + w, :]
    return total / 9.0


def ssim(a: Image | np.ndarray, b: Image | np.ndarray) -> np.ndarray:
    """
    Per-pixel structural similarity with a 3 x 3 mean window.

    Args:
        a: Image or (..., H, W, C) array.
        b: Same shape as a.

    Returns:
        (..., H, W) SSIM averaged over channels, in [-1, 1].
    """
    x = a.values if isinstance(a, Image) else np.asarray(a, dtype=np.float64)
    y = b.values if isinstance(b, Image) else np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise InvalidArgumentError("SSIM inputs differ in shape")
    mu_x = _box3(x)
    mu_y = _box3(y)
    mu_xy = mu_x * mu_y
    mu_xx = mu_x * mu_x
    mu_yy = mu_y * mu_y
    sigma_x = _box3(x * x) - mu_xx
    sigma_y = _box3(y * y) - mu_yy
    sigma_xy = _box3(x * y) - mu_xy
    num = (2.0 * mu_xy + SSIM_C1) * (2.0 * sigma_xy + SSIM_C2)
    den = (mu_xx + mu_yy + SSIM_C1) * (sigma_x + sigma_y + SSIM_C2)
    return np.clip(num / den, -1.0, 1.0).mean(axis=-1)


def rgb_reconstruction_loss(
    patches: np.ndarray, rendered: np.ndarray, weights: LossWeights | None = None
) -> float:
    """
    β1 mean((1 - SSIM) / 2) + β2 mean|I - Î_r| over a stack of patches.

    Args:
        patches: (P, l, l, 3) image patches.
        rendered: (P, l, l, 3) rendered patches.
        weights: Loss weights; defaults when None.

    Raises:
        EmptySupportError: On an empty stack.
    """
    weights = weights or LossWeights()
    patches = np.asarray(patches, dtype=np.float64)
    rendered = np.asarray(rendered, dtype=np.float64)
    if patches.shape != rendered.shape:
        raise InvalidArgumentError("patch stacks differ in shape")
    if patches.size == 0:
        raise EmptySupportError("no patches to compare")
    dssim = (1.0 - ssim(patches, rendered)) / 2.0
    l1 = np.abs(patches - rendered)
    return float(weights.beta1 * dssim.mean() + weights.beta2 * l1.mean())


def total_loss(
    temporal: float, depth: float, rgb: float, weights: LossWeights | None = None
) -> float:
    """λ1 L_ta + λ2 (L_d + L_rgb)."""
    weights = weights or LossWeights()
    if any(math.isnan(c) for c in (temporal, depth, rgb)):
        raise NumericFailureError(
            "loss component is NaN", temporal=temporal, depth=depth, rgb=rgb
        )
    return weights.lambda1 * temporal + weights.lambda2 * (depth + rgb)


@dataclass(frozen=True)
class LossReport:
    """Every loss component with its support size."""

    temporal: float
    depth: float
    rgb: float
    total: float
    temporal_pixels: int
    depth_pixels: int
    patches: int

    def to_dict(self) -> dict:
        return asdict(self)
