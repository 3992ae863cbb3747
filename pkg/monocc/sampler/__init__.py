"""Semantic-guided non-overlapping patch sampling."""

from monocc.sampler.efficiency import SamplerEfficiency, crucial_mask, sampler_efficiency
from monocc.sampler.instances import (
    InstanceMeta,
    instance_from_dict,
    load_instances,
    save_instances,
)
from monocc.sampler.mixture import (
    GaussianComponent,
    MixturePdf,
    UniformRegion,
    build_mixture,
    gaussian_coverage,
    pdf_eval,
    pdf_heatmap,
    pdf_values,
)
from monocc.sampler.patches import (
    PatchSet,
    anchor_domain,
    conditioned_accept,
    sample_patches,
    sample_random_patches,
)

__all__ = [
    "InstanceMeta",
    "instance_from_dict",
    "load_instances",
    "save_instances",
    "GaussianComponent",
    "UniformRegion",
    "MixturePdf",
    "build_mixture",
    "pdf_eval",
    "pdf_values",
    "pdf_heatmap",
    "gaussian_coverage",
    "PatchSet",
    "anchor_domain",
    "conditioned_accept",
    "sample_patches",
    "sample_random_patches",
    "SamplerEfficiency",
    "crucial_mask",
    "sampler_efficiency",
]
