"""Non-overlapping patch sampling.

A candidate anchor x is accepted only if no anchor already in the set X lies
within squared distance 2 l^2 of it. Any two l x l patches whose centres
satisfy this are disjoint, since overlap needs |du| < l and |dv| < l.
"""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from monocc.errors import InvalidArgumentError
from monocc.geometry.camera import Pixel
from monocc.sampler.mixture import MixturePdf

DRAW_BATCH = 64


@dataclass(frozen=True, eq=False)
class PatchSet:
    """
    Accepted patch anchors of one sampling run.

    Attributes:
        anchors: (k, 2) patch centres as (u, v), in draw order.
        patch_size: Side length l in pixels.
        width: Image width.
        height: Image height.
        requested: Number of anchors asked for.
        rejected_count: Draws rejected by the domain or overlap tests.
    """

    anchors: np.ndarray
    patch_size: int
    width: int
    height: int
    requested: int
    rejected_count: int = 0

    @property
    def count(self) -> int:
        return int(self.anchors.shape[0])

    @property
    def complete(self) -> bool:
        return self.count == self.requested

    def pixels(self) -> list[Pixel]:
        return [Pixel(float(u), float(v)) for u, v in self.anchors]

    def corners(self) -> np.ndarray:
        """(k, 2) top-left (column, row) of every patch footprint."""
        return np.floor(self.anchors - self.patch_size / 2.0).astype(np.int64)

    def coverage_mask(self) -> np.ndarray:
        """(H, W) union of all patch footprints."""
        mask = np.zeros((self.height, self.width), dtype=bool)
        l = self.patch_size
        for c0, r0 in self.corners():
            mask[r0 : r0 + l, c0 : c0 + l] = True
        return mask

    def min_pair_distance_sq(self) -> float:
        """Smallest squared distance between two anchors (inf below two)."""
        if self.count < 2:
            return float("inf")
        diff = self.anchors[:, None, :] - self.anchors[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        np.fill_diagonal(d2, np.inf)
        return float(d2.min())

    def to_dict(self) -> dict[str, Any]:
        return {
            "anchors": self.anchors.tolist(),
            "patch_size": self.patch_size,
            "width": self.width,
            "height": self.height,
            "requested": self.requested,
            "count": self.count,
            "rejected_count": self.rejected_count,
        }


def anchor_domain(width: int, height: int, patch_size: int) -> tuple[float, float, float, float]:
    """
    Region of valid patch centres, [l/2, W - l/2] x [l/2, H - l/2].

    Returns:
        (u_lo, u_hi, v_lo, v_hi).

    Raises:
        InvalidArgumentError: If the patch does not fit into the image.
    """
    if patch_size < 1:
        raise InvalidArgumentError("patch size must be >= 1", patch_size=patch_size)
    if patch_size > width or patch_size > height:
        raise InvalidArgumentError(
            "patch does not fit into the image",
            patch_size=patch_size,
            width=width,
            height=height,
        )
    half = patch_size / 2.0
    return half, width - half, half, height - half


def conditioned_accept(
    anchors: np.ndarray | Sequence[Pixel], x: Pixel, patch_size: int
) -> bool:
    """
    Whether x keeps squared distance >= 2 l^2 to every existing anchor.

    Args:
        anchors: (k, 2) array of (u, v) or a sequence of Pixels.
        x: Candidate anchor.
        patch_size: Side length l.

    Returns:
        False iff some anchor lies strictly closer than sqrt(2) l.
    """
    if len(anchors) == 0:
        return True
    if not isinstance(anchors, np.ndarray):
        anchors = np.array([[a.u, a.v] for a in anchors], dtype=np.float64)
    du = anchors[:, 0] - x.u
    dv = anchors[:, 1] - x.v
    return bool(np.min(du * du + dv * dv) >= 2.0 * patch_size * patch_size)


def sample_patches(
    pdf: MixturePdf,
    n: int,
    patch_size: int,
    seed: int | np.random.Generator,
    max_attempts: int = 10_000,
) -> PatchSet:
    """
    Draw up to n non-overlapping patch anchors from the mixture.

    Each draw picks a component, samples a position, and is rejected when it
    leaves the anchor domain or fails conditioned_accept. Sampling stops after
    ``max_attempts`` draws; a partial set is returned with its rejection count.

    Args:
        pdf: Sampling mixture.
        n: Number of anchors requested.
        patch_size: Patch side length l.
        seed: Seed or generator.
        max_attempts: Draw budget.

    Returns:
        The PatchSet.
    """
    if n < 1:
        raise InvalidArgumentError("need n >= 1", n=n)
    if max_attempts < 1:
        raise InvalidArgumentError("need max_attempts >= 1", max_attempts=max_attempts)
    u_lo, u_hi, v_lo, v_hi = anchor_domain(pdf.width, pdf.height, patch_size)
    rng = np.random.default_rng(seed)
    threshold = 2.0 * patch_size * patch_size

    anchors = np.empty((n, 2), dtype=np.float64)
    count = 0
    attempts = 0
    while count < n and attempts < max_attempts:
        batch = min(DRAW_BATCH, max_attempts - attempts)
        us, vs, _ = pdf.draw(rng, batch)
        for x, y in zip(us.tolist(), vs.tolist()):
            if count >= n:
                break
            attempts += 1
            if not (u_lo <= x <= u_hi and v_lo <= y <= v_hi):
                continue
            if count:
                du = anchors[:count, 0] - x
                dv = anchors[:count, 1] - y
                if np.min(du * du + dv * dv) < threshold:
                    continue
            anchors[count] = (x, y)
            count += 1

    return PatchSet(
        anchors=anchors[:count].copy(),
        patch_size=patch_size,
        width=pdf.width,
        height=pdf.height,
        requested=n,
        rejected_count=attempts - count,
    )


def sample_random_patches(
    width: int, height: int, n: int, patch_size: int, seed: int | np.random.Generator
) -> PatchSet:
    """Baseline sampler: n anchors uniform over the anchor domain, overlap allowed."""
    if n < 1:
        raise InvalidArgumentError("need n >= 1", n=n)
    u_lo, u_hi, v_lo, v_hi = anchor_domain(width, height, patch_size)
    rng = np.random.default_rng(seed)
    anchors = np.column_stack(
        [rng.uniform(u_lo, u_hi, size=n), rng.uniform(v_lo, v_hi, size=n)]
    )
    return PatchSet(
        anchors=anchors,
        patch_size=patch_size,
        width=width,
        height=height,
        requested=n,
    )
