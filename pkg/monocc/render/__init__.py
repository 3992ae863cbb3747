"""Volume rendering of density fields."""

from monocc.render.quadrature import (
    RaySampling,
    RenderBatch,
    RenderResult,
    SamplingMode,
    alpha_from_sigma,
    composite,
    patch_pixels,
    render_image,
    render_patch,
    render_ray,
    render_rays,
    sample_distances,
)

__all__ = [
    "RaySampling",
    "RenderResult",
    "RenderBatch",
    "SamplingMode",
    "alpha_from_sigma",
    "composite",
    "sample_distances",
    "render_ray",
    "render_rays",
    "render_patch",
    "render_image",
    "patch_pixels",
]
