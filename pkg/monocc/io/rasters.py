"""Raster files: PFM for float maps, binary PPM (P6) for RGB.

Both formats go through Pillow's PPM plugin, which writes PFM little-endian
with scale -1.0 and rows stored bottom to top.
"""

from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import ImageDraw, UnidentifiedImageError

from monocc.errors import FormatError
from monocc.maps import DepthMap, Image

OVERLAY_COLOR = (255, 0, 0)


def _prepare(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_pfm(path: str | Path, raster: np.ndarray) -> Path:
    """Write a 2-D float raster as single-precision PFM."""
    raster = np.ascontiguousarray(raster, dtype=np.float32)
    if raster.ndim != 2:
        raise FormatError("PFM rasters must be 2-D", shape=list(raster.shape))
    path = _prepare(path)
    PILImage.fromarray(raster).save(path, format="PPM")
    return path


def read_pfm(path: str | Path) -> np.ndarray:
    """Read a single-channel PFM into a float64 (H, W) array."""
    try:
        with PILImage.open(path) as im:
            if im.mode != "F":
                raise FormatError(f"{path} is not a single-channel PFM", mode=im.mode)
            return np.asarray(im, dtype=np.float32).astype(np.float64)
    except (UnidentifiedImageError, ValueError, SyntaxError) as e:
        raise FormatError(f"malformed PFM file {path}: {e}") from e


def write_ppm(path: str | Path, image: Image | np.ndarray) -> Path:
    """Write an RGB image in [0, 1] as 8-bit binary PPM."""
    values = image.values if isinstance(image, Image) else np.asarray(image, dtype=np.float64)
    data = np.rint(np.clip(values, 0.0, 1.0) * 255.0).astype(np.uint8)
    path = _prepare(path)
    PILImage.fromarray(data).save(path, format="PPM")
    return path


def read_ppm(path: str | Path) -> Image:
    """Read an 8-bit PPM as an Image with values in [0, 1]."""
    try:
        with PILImage.open(path) as im:
            data = np.asarray(im.convert("RGB"), dtype=np.float64)
    except (UnidentifiedImageError, ValueError, SyntaxError) as e:
        raise FormatError(f"malformed PPM file {path}: {e}") from e
    return Image(data / 255.0)


def write_depth(path: str | Path, depth: DepthMap) -> Path:
    """Write a depth map as PFM with 0 at invalid pixels."""
    return write_pfm(path, depth.to_raw())


def read_depth(path: str | Path) -> DepthMap:
    """Read a depth PFM; non-positive and non-finite values are invalid."""
    return DepthMap.from_raw(read_pfm(path))


def write_patch_overlay(
    path: str | Path, image: Image, corners: np.ndarray, patch_size: int
) -> Path:
    """Draw patch footprints (top-left corners, side l) over an image as PPM."""
    data = np.rint(np.clip(image.values, 0.0, 1.0) * 255.0).astype(np.uint8)
    canvas = PILImage.fromarray(data)
    draw = ImageDraw.Draw(canvas)
    for c0, r0 in np.asarray(corners, dtype=np.int64).tolist():
        draw.rectangle(
            [c0, r0, c0 + patch_size - 1, r0 + patch_size - 1], outline=OVERLAY_COLOR
        )
    path = _prepare(path)
    canvas.save(path, format="PPM")
    return path
