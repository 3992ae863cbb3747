"""Discrete volume rendering along rays.

For samples t_1 < ... < t_M on a ray with segment lengths
Δ_i = t_{i+1} - t_i (and Δ_M = far - t_M):

    α_i = 1 - exp(-σ_i Δ_i),   T_i = Π_{j<i} (1 - α_j),   w_i = T_i α_i
    rgb = Σ w_i c_i,           distance = Σ w_i t_i

The distance is not renormalized by the weight sum unless expected-depth
mode is requested, so empty space renders distance 0.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from monocc.errors import InvalidArgumentError
from monocc.field.base import DensityField
from monocc.geometry.camera import CameraIntrinsics, Pixel, patch_corner, pixel_grid
from monocc.geometry.pose import Pose
from monocc.geometry.rays import Ray, rays_through_pixels

CHUNK_RAYS = 4096
EXPECTED_DEPTH_MIN_WEIGHT = 1e-6


class SamplingMode(Enum):
    """Placement of samples along a ray."""

    UNIFORM = "uniform"
    STRATIFIED = "stratified"


@dataclass(frozen=True)
class RaySampling:
    """Sample placement along rays."""

    near: float = 0.5
    far: float = 80.0
    num_samples: int = 64
    mode: SamplingMode = SamplingMode.UNIFORM
    seed: int = 0  # Stratification jitter seed
    expected_depth: bool = False

    def __post_init__(self):
        if not (0.0 <= self.near < self.far):
            raise InvalidArgumentError("need 0 <= near < far", near=self.near, far=self.far)
        if self.num_samples < 2:
            raise InvalidArgumentError("need at least two samples per ray")
        object.__setattr__(self, "mode", SamplingMode(self.mode))

    @property
    def segment(self) -> float:
        """Nominal segment length (far - near) / M."""
        return (self.far - self.near) / self.num_samples

    @classmethod
    def from_config(cls, config, seed: int = 0) -> "RaySampling":
        """Build from a RenderConfig."""
        return cls(
            near=config.near,
            far=config.far,
            num_samples=config.num_samples,
            mode=SamplingMode(config.mode),
            seed=seed,
            expected_depth=config.expected_depth,
        )


@dataclass(frozen=True, eq=False)
class RenderResult:
    """Rendered values of a single ray."""

    rgb: np.ndarray
    distance: float
    transmittance_final: float
    weights: np.ndarray


@dataclass(frozen=True, eq=False)
class RenderBatch:
    """Rendered values of N rays."""

    rgb: np.ndarray  # (N, 3)
    distance: np.ndarray  # (N,)
    transmittance_final: np.ndarray  # (N,)
    weights: np.ndarray  # (N, M)
    distances: np.ndarray  # (N, M) sample distances t_i


def alpha_from_sigma(sigma, delta):
    """
    Opacity of a segment: 1 - exp(-sigma * delta).

    Args:
        sigma: Density (1/m), scalar or array, >= 0.
        delta: Segment length (m), scalar or array, >= 0.

    Returns:
        Opacity in [0, 1), same shape as the broadcast inputs.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    if np.any(sigma < 0) or np.any(delta < 0):
        raise InvalidArgumentError("sigma and delta must be non-negative")
    alpha = -np.expm1(-sigma * delta)
    return float(alpha) if alpha.ndim == 0 else alpha


def sample_distances(sampling: RaySampling, num_rays: int) -> np.ndarray:
    """
    Sample distances t_i for each ray, shape (num_rays, M).

    Uniform mode places t_i = near + i * Δ; stratified mode jitters each
    sample uniformly inside its segment, seeded by ``sampling.seed``.
    """
    m = sampling.num_samples
    step = sampling.segment
    base = sampling.near + np.arange(m, dtype=np.float64) * step
    if sampling.mode is SamplingMode.UNIFORM:
        return np.broadcast_to(base, (num_rays, m)).copy()
    rng = np.random.default_rng(sampling.seed)
    return base + rng.random((num_rays, m)) * step


def composite(
    sigmas: np.ndarray,
    colors: np.ndarray,
    t: np.ndarray,
    far: float,
    expected_depth: bool = False,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Alpha-composite samples along rays.

    Args:
        sigmas: (N, M) densities.
        colors: (N, M, 3) colours.
        t: (N, M) sample distances, increasing along M.
        far: Far bound closing the last segment.
        expected_depth: Divide distance by the weight sum where it exceeds 1e-6.

    Returns:
        (rgb (N, 3), distance (N,), transmittance_final (N,), weights (N, M)).
    """
    deltas = np.diff(t, axis=-1, append=np.full(t.shape[:-1] + (1,), far))
    alpha = alpha_from_sigma(sigmas, np.maximum(deltas, 0.0))
    keep = 1.0 - alpha
    transmittance = np.cumprod(keep, axis=-1)
    t_final = transmittance[..., -1].copy()
    transmittance = np.concatenate(
        [np.ones(t.shape[:-1] + (1,)), transmittance[..., :-1]], axis=-1
    )
    weights = transmittance * alpha
    rgb = np.sum(weights[..., None] * colors, axis=-2)
    distance = np.sum(weights * t, axis=-1)
    if expected_depth:
        total = weights.sum(axis=-1)
        distance = np.where(
            total > EXPECTED_DEPTH_MIN_WEIGHT,
            distance / np.maximum(total, EXPECTED_DEPTH_MIN_WEIGHT),
            0.0,
        )
    return rgb, distance, t_final, weights


def _render_chunk(field: DensityField, origins, directions, t, sampling: RaySampling):
    points = origins[:, None, :] + t[..., None] * directions[:, None, :]
    sigmas = field.sigma(points)
    colors = field.color(points)
    return composite(sigmas, colors, t, sampling.far, sampling.expected_depth)


def render_rays(
    field: DensityField,
    origins: np.ndarray,
    directions: np.ndarray,
    sampling: RaySampling,
    workers: int = 1,
) -> RenderBatch:
    """
    Render many rays.

    Rays are split into fixed-size chunks that may run on ``workers``
    threads; stratification jitter is drawn once up front, so the result does
    not depend on scheduling.

    Args:
        field: Density field.
        origins: (N, 3) ray origins.
        directions: (N, 3) unit directions.
        sampling: Sample placement.
        workers: Thread count.

    Returns:
        RenderBatch with per-ray results.
    """
    origins = np.asarray(origins, dtype=np.float64).reshape(-1, 3)
    directions = np.asarray(directions, dtype=np.float64).reshape(-1, 3)
    n = origins.shape[0]
    t = sample_distances(sampling, n)
    bounds = [(s, min(s + CHUNK_RAYS, n)) for s in range(0, n, CHUNK_RAYS)]

    def run(span):
        s, e = span
        return _render_chunk(field, origins[s:e], directions[s:e], t[s:e], sampling)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(span) for span in bounds]

    m = sampling.num_samples
    if not parts:
        return RenderBatch(
            np.zeros((0, 3)), np.zeros(0), np.zeros(0), np.zeros((0, m)), t
        )
    rgb, distance, t_final, weights = (np.concatenate(p) for p in zip(*parts))
    return RenderBatch(rgb, distance, t_final, weights, t)


def render_ray(field: DensityField, ray: Ray, sampling: RaySampling) -> RenderResult:
    """
    Render one ray.

    Args:
        field: Density field.
        ray: Ray in world coordinates.
        sampling: Sample placement.

    Returns:
        RenderResult with rgb, distance, final transmittance and weights.
    """
    batch = render_rays(field, ray.origin[None, :], ray.direction[None, :], sampling)
    return RenderResult(
        rgb=batch.rgb[0],
        distance=float(batch.distance[0]),
        transmittance_final=float(batch.transmittance_final[0]),
        weights=batch.weights[0],
    )


def patch_pixels(
    K: CameraIntrinsics, anchor: Pixel, patch_size: int
) -> tuple[np.ndarray, np.ndarray]:
    """
    Pixel centre coordinates of the patch centred on an anchor.

    Returns:
        (u, v), each (l, l), row-major.

    Raises:
        InvalidArgumentError: If the patch leaves the image.
    """
    if patch_size < 1:
        raise InvalidArgumentError("patch size must be >= 1")
    c0, r0 = patch_corner(anchor, patch_size)
    if c0 < 0 or r0 < 0 or c0 + patch_size > K.width or r0 + patch_size > K.height:
        raise InvalidArgumentError(
            "patch leaves the image", u=anchor.u, v=anchor.v, patch_size=patch_size
        )
    rows, cols = np.meshgrid(
        np.arange(r0, r0 + patch_size, dtype=np.float64),
        np.arange(c0, c0 + patch_size, dtype=np.float64),
        indexing="ij",
    )
    return cols, rows


def render_patch(
    field: DensityField,
    K: CameraIntrinsics,
    pose: Pose,
    anchor: Pixel,
    patch_size: int,
    sampling: RaySampling,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Render the l x l patch centred on an anchor.

    Returns:
        (rgb (l, l, 3), distance (l, l)).
    """
    u, v = patch_pixels(K, anchor, patch_size)
    origins, directions = rays_through_pixels(K, pose, u, v)
    batch = render_rays(field, origins, directions, sampling, workers)
    return (
        batch.rgb.reshape(patch_size, patch_size, 3),
        batch.distance.reshape(patch_size, patch_size),
    )


def render_image(
    field: DensityField,
    K: CameraIntrinsics,
    pose: Pose,
    sampling: RaySampling,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Render every pixel of the image.

    Returns:
        (rgb (H, W, 3), distance (H, W)).
    """
    u, v = pixel_grid(K)
    origins, directions = rays_through_pixels(K, pose, u, v)
    batch = render_rays(field, origins, directions, sampling, workers)
    return (
        batch.rgb.reshape(K.height, K.width, 3),
        batch.distance.reshape(K.height, K.width),
    )
