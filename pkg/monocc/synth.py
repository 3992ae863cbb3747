"""Synthetic views of analytic scenes.

Ground truth comes from exact ray/primitive intersection, never from the
quadrature renderer, so rendered values can be checked against it.
"""

from dataclasses import dataclass

import numpy as np

from monocc.field.analytic import AnalyticField
from monocc.geometry.camera import CameraIntrinsics, Pixel, pixel_grid, ray_norms
from monocc.geometry.pose import Pose
from monocc.geometry.rays import rays_through_pixels
from monocc.log import log
from monocc.maps import DepthMap, Image
from monocc.sampler.instances import InstanceMeta


@dataclass(frozen=True, eq=False)
class SynthView:
    """
    One synthesized camera view.

    Attributes:
        image: Flat-shaded RGB image (primitive colour or background).
        depth: Planar ground-truth depth, NaN where the ray hits nothing.
        distance: (H, W) distance along each pixel ray, inf on misses.
        index: (H, W) index of the primitive hit first, -1 on misses.
    """

    image: Image
    depth: DepthMap
    distance: np.ndarray
    index: np.ndarray

    @property
    def hit_pixels(self) -> int:
        return int(np.count_nonzero(self.index >= 0))


def synthesize_view(field: AnalyticField, K: CameraIntrinsics, pose: Pose) -> SynthView:
    """
    Render an analytic scene exactly from one camera.

    Args:
        field: Analytic scene.
        K: Camera intrinsics.
        pose: Camera-to-world pose.

    Returns:
        SynthView.
    """
    u, v = pixel_grid(K)
    origins, directions = rays_through_pixels(K, pose, u, v)
    dist, index = field.first_hits(origins, directions)
    dist = dist.reshape(K.shape)
    index = index.reshape(K.shape)

    colors = np.asarray([p.color for p in field.primitives], dtype=np.float64).reshape(-1, 3)
    rgb = np.broadcast_to(field.background, K.shape + (3,)).copy()
    hit = index >= 0
    rgb[hit] = colors[index[hit]]

    # A camera inside a primitive sees distance 0: no usable depth there.
    usable = hit & (dist > 0)
    planar = np.full(K.shape, np.nan)
    planar[usable] = dist[usable] / ray_norms(K)[usable]
    return SynthView(Image(rgb), DepthMap(planar), dist, index)


def derive_instances(field: AnalyticField, index: np.ndarray) -> list[InstanceMeta]:
    """
    Instance metadata for every categorized primitive visible in a view.

    The box is the tight pixel bounding box widened by half a pixel on each
    side; the area is the visible pixel count. Instances covering at most one
    pixel are dropped.

    Args:
        field: The scene that produced ``index``.
        index: (H, W) first-hit primitive indices from synthesize_view.

    Returns:
        Instances in primitive order.
    """
    instances = []
    for k, prim in enumerate(field.primitives):
        if prim.category is None:
            continue
        rows, cols = np.nonzero(index == k)
        if rows.size <= 1:
            continue
        r0, r1 = int(rows.min()), int(rows.max())
        c0, c1 = int(cols.min()), int(cols.max())
        instances.append(
            InstanceMeta(
                category=prim.category,
                center=Pixel((c0 + c1) / 2.0, (r0 + r1) / 2.0),
                half_extents=((r1 - r0) / 2.0 + 0.5, (c1 - c0) / 2.0 + 0.5),
                area=float(rows.size),
            )
        )
    log("SYNTH", f"derived {len(instances)} instances")
    return instances


__all__ = ["SynthView", "synthesize_view", "derive_instances"]
