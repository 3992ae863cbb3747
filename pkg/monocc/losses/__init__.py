"""Warping and the photometric / reconstruction losses."""

from monocc.losses.photometric import (
    SSIM_C1,
    SSIM_C2,
    LossReport,
    LossWeights,
    build_weight_mask,
    depth_reconstruction_loss,
    rgb_reconstruction_loss,
    ssim,
    temporal_alignment_loss,
    total_loss,
)
from monocc.losses.warp import (
    WarpResult,
    bilinear_sample,
    reprojection_coordinates,
    warp_image,
)

__all__ = [
    "SSIM_C1",
    "SSIM_C2",
    "LossWeights",
    "LossReport",
    "WarpResult",
    "reprojection_coordinates",
    "bilinear_sample",
    "warp_image",
    "build_weight_mask",
    "temporal_alignment_loss",
    "depth_reconstruction_loss",
    "ssim",
    "rgb_reconstruction_loss",
    "total_loss",
]
