"""Semantic-guided Gaussian mixture over image pixels.

    p(x) = (1 - γ) Σ_k π_k N(x | μ_k, Σ_k) + γ U(x | s)

Crucial instances (Gaussian strategy) contribute one component each, with
μ_k the box centre, Σ_k = diag(b_k ∘ b_k / 4) and π_k proportional to
log s_k. The uniform component covers every pixel outside the Gaussian
instances' boxes.
"""

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from monocc.config.strategies import UNLABELED, SamplingStrategyTable
from monocc.errors import InvalidArgumentError
from monocc.geometry.camera import Pixel
from monocc.sampler.instances import InstanceMeta


@dataclass(frozen=True)
class GaussianComponent:
    """One per-instance Gaussian."""

    mean: Pixel
    std_v: float  # b_k half-height / 2
    std_u: float  # b_k half-width / 2
    weight: float  # π_k
    category: str

    @property
    def covariance(self) -> np.ndarray:
        """Σ_k in (v, u) order, matching b_k = (half-height, half-width)."""
        return np.diag([self.std_v**2, self.std_u**2])

    def density(self, u, v):
        du = (np.asarray(u, dtype=np.float64) - self.mean.u) / self.std_u
        dv = (np.asarray(v, dtype=np.float64) - self.mean.v) / self.std_v
        norm = 2.0 * math.pi * self.std_u * self.std_v
        return np.exp(-0.5 * (du * du + dv * dv)) / norm


@dataclass(frozen=True)
class UniformRegion:
    """Registered area of a uniformly sampled category."""

    category: str
    area: float


@dataclass(frozen=True, eq=False)
class MixturePdf:
    """
    The sampling mixture over a W x H image.

    ``support`` is the (H, W) pixel mask of the uniform component and
    ``support_area`` its pixel count s. ``registered_area`` is the sum of the
    uniform regions (uniform instances plus unlabeled background).
    """

    gaussians: tuple[GaussianComponent, ...]
    uniform_regions: tuple[UniformRegion, ...]
    gamma: float
    width: int
    height: int
    support: np.ndarray
    support_area: float

    @property
    def effective_gamma(self) -> float:
        """γ, or 1 when there are no Gaussian components."""
        return 1.0 if not self.gaussians else self.gamma

    @property
    def registered_area(self) -> float:
        return float(sum(r.area for r in self.uniform_regions))

    @property
    def component_probabilities(self) -> np.ndarray:
        """Selection probabilities ((1 - γ) π_1, ..., (1 - γ) π_K, γ)."""
        gamma = self.effective_gamma
        weights = [(1.0 - gamma) * g.weight for g in self.gaussians]
        return np.asarray(weights + [gamma], dtype=np.float64)

    def draw(self, rng: np.random.Generator, count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Draw raw (pre-truncation) samples from the mixture.

        Args:
            rng: Random generator.
            count: Number of draws.

        Returns:
            (u, v, labels): labels hold the Gaussian index, or -1 for uniform.
        """
        probs = self.component_probabilities
        labels = rng.choice(len(probs), size=count, p=probs / probs.sum())
        labels[labels == len(self.gaussians)] = -1
        u = np.empty(count)
        v = np.empty(count)

        uniform = labels == -1
        n_uniform = int(uniform.sum())
        if n_uniform:
            rows, cols = np.nonzero(self.support)
            pick = rng.integers(0, rows.size, size=n_uniform)
            u[uniform] = cols[pick] + rng.random(n_uniform) - 0.5
            v[uniform] = rows[pick] + rng.random(n_uniform) - 0.5

        if self.gaussians:
            means_u = np.array([g.mean.u for g in self.gaussians])
            means_v = np.array([g.mean.v for g in self.gaussians])
            std_u = np.array([g.std_u for g in self.gaussians])
            std_v = np.array([g.std_v for g in self.gaussians])
            k = labels[~uniform]
            z = rng.standard_normal((k.size, 2))
            u[~uniform] = means_u[k] + std_u[k] * z[:, 0]
            v[~uniform] = means_v[k] + std_v[k] * z[:, 1]
        return u, v, labels

    def to_dict(self) -> dict[str, Any]:
        return {
            "gamma": self.gamma,
            "effective_gamma": self.effective_gamma,
            "width": self.width,
            "height": self.height,
            "support_area": self.support_area,
            "registered_area": self.registered_area,
            "gaussians": [
                {
                    "category": g.category,
                    "mean": [g.mean.u, g.mean.v],
                    "covariance_diag": [g.std_v**2, g.std_u**2],
                    "weight": g.weight,
                }
                for g in self.gaussians
            ],
            "uniform_regions": [
                {"category": r.category, "area": r.area} for r in self.uniform_regions
            ],
        }


def build_mixture(
    instances: list[InstanceMeta],
    table: SamplingStrategyTable,
    gamma: float,
    width: int,
    height: int,
) -> MixturePdf:
    """
    Build the sampling mixture of one image.

    Args:
        instances: Instance metadata.
        table: Category to strategy lookup.
        gamma: Background sampling ratio in [0, 1].
        width: Image width in pixels.
        height: Image height in pixels.

    Returns:
        The MixturePdf.

    Raises:
        InvalidArgumentError: On gamma outside [0, 1], a centre outside the
            image, an unknown category, or a Gaussian instance with area <= 1.
    """
    if not 0.0 <= gamma <= 1.0:
        raise InvalidArgumentError("gamma must lie in [0, 1]", gamma=gamma)
    if width < 1 or height < 1:
        raise InvalidArgumentError("image must be non-empty")

    gaussian: list[InstanceMeta] = []
    regions: list[UniformRegion] = []
    for inst in instances:
        if not (0 <= inst.center.u <= width - 1 and 0 <= inst.center.v <= height - 1):
            raise InvalidArgumentError(
                "instance centre lies outside the image",
                u=inst.center.u,
                v=inst.center.v,
            )
        if table.is_gaussian(inst.category):
            if inst.area <= 1.0:
                raise InvalidArgumentError(
                    "Gaussian instance needs area > 1", category=inst.category, area=inst.area
                )
            gaussian.append(inst)
        else:
            regions.append(UniformRegion(table.canonical(inst.category), inst.area))

    background = max(0.0, float(width * height) - sum(i.area for i in instances))
    regions.append(UniformRegion(UNLABELED, background))

    logs = np.array([math.log(i.area) for i in gaussian], dtype=np.float64)
    weights = logs / logs.sum() if logs.size else logs
    components = tuple(
        GaussianComponent(
            mean=inst.center,
            std_v=inst.half_height / 2.0,
            std_u=inst.half_width / 2.0,
            weight=float(w),
            category=table.canonical(inst.category),
        )
        for inst, w in zip(gaussian, weights)
    )

    support = np.ones((height, width), dtype=bool)
    for inst in gaussian:
        support &= ~inst.bbox_mask(width, height)
    if not support.any():
        # Instance boxes cover the whole image
        support[:] = True

    return MixturePdf(
        gaussians=components,
        uniform_regions=tuple(regions),
        gamma=float(gamma),
        width=width,
        height=height,
        support=support,
        support_area=float(support.sum()),
    )


def pdf_values(pdf: MixturePdf, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Vectorized pdf_eval; 0 outside [0, W-1] x [0, H-1]."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    inside = (u >= 0) & (u <= pdf.width - 1) & (v >= 0) & (v <= pdf.height - 1)
    gamma = pdf.effective_gamma
    out = np.zeros(np.broadcast(u, v).shape)
    for g in pdf.gaussians:
        out += (1.0 - gamma) * g.weight * g.density(u, v)
    if gamma > 0.0:
        cols = np.clip(np.rint(u), 0, pdf.width - 1).astype(np.int64)
        rows = np.clip(np.rint(v), 0, pdf.height - 1).astype(np.int64)
        out += np.where(pdf.support[rows, cols], gamma / pdf.support_area, 0.0)
    return np.where(inside, out, 0.0)


def pdf_eval(pdf: MixturePdf, x: Pixel) -> float:
    """
    Mixture density at a pixel position (1 / pixels^2).

    Args:
        pdf: The mixture.
        x: Query position.

    Returns:
        p(x), or 0 when x lies outside the image.
    """
    return float(pdf_values(pdf, np.array(x.u), np.array(x.v)))


def pdf_heatmap(pdf: MixturePdf) -> np.ndarray:
    """(H, W) raster of the density at pixel centres."""
    rows, cols = np.meshgrid(
        np.arange(pdf.height, dtype=np.float64),
        np.arange(pdf.width, dtype=np.float64),
        indexing="ij",
    )
    return pdf_values(pdf, cols, rows)


def gaussian_coverage(
    pdf: MixturePdf, u: np.ndarray, v: np.ndarray, labels: np.ndarray
) -> dict[str, float]:
    """
    Share of Gaussian draws landing within +/- b_k of their component mean.

    Returns:
        ``{"u": ..., "v": ..., "joint": ..., "draws": ...}``; rates are NaN
        when no Gaussian draw is present.
    """
    chosen = labels >= 0
    n = int(chosen.sum())
    if n == 0:
        return {"u": math.nan, "v": math.nan, "joint": math.nan, "draws": 0}
    k = labels[chosen]
    means_u = np.array([g.mean.u for g in pdf.gaussians])[k]
    means_v = np.array([g.mean.v for g in pdf.gaussians])[k]
    half_u = 2.0 * np.array([g.std_u for g in pdf.gaussians])[k]
    half_v = 2.0 * np.array([g.std_v for g in pdf.gaussians])[k]
    in_u = np.abs(u[chosen] - means_u) <= half_u
    in_v = np.abs(v[chosen] - means_v) <= half_v
    return {
        "u": float(in_u.mean()),
        "v": float(in_v.mean()),
        "joint": float((in_u & in_v).mean()),
        "draws": n,
    }
