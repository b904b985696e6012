"""Raster conventions and PNG I/O shared by all subpackages.

Images are numpy uint8 arrays, shape (H, W, 3) for color and (H, W, 1) for
single-channel rasters. Model-facing code converts to float in [-1, 1].
"""

from __future__ import annotations

import numpy as np
from PIL import Image


def to_float(img: np.ndarray) -> np.ndarray:
    """uint8 [0,255] -> float32 [-1,1]."""
    return img.astype(np.float32) / 127.5 - 1.0


def to_uint8(img: np.ndarray) -> np.ndarray:
    """float [-1,1] -> uint8 [0,255], clipped and rounded."""
    return np.clip(np.rint((np.asarray(img, dtype=np.float64) + 1.0) * 127.5), 0, 255).astype(np.uint8)


def to_unit(img: np.ndarray) -> np.ndarray:
    """uint8 [0,255] -> float64 [0,1]."""
    return img.astype(np.float64) / 255.0


def load_png(path) -> np.ndarray:
    """Load a PNG as (H, W, C) uint8 with C in {1, 3}."""
    with Image.open(path) as im:
        if im.mode in ("L", "1", "I;16"):
            arr = np.asarray(im.convert("L"), dtype=np.uint8)[:, :, None]
        else:
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    return arr


def save_png(path, img: np.ndarray) -> None:
    """Save (H, W, C) uint8 to PNG; C=1 saved as grayscale."""
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ValueError(f"expected uint8 raster, got {img.dtype}")
    if img.ndim == 3 and img.shape[2] == 1:
        Image.fromarray(img[:, :, 0], mode="L").save(path)
    elif img.ndim == 3 and img.shape[2] == 3:
        Image.fromarray(img, mode="RGB").save(path)
    elif img.ndim == 2:
        Image.fromarray(img, mode="L").save(path)
    else:
        raise ValueError(f"unsupported raster shape {img.shape}")


def mask_to_png(mask: np.ndarray) -> np.ndarray:
    """{0,1} mask -> {0,255} uint8 for storage."""
    return (np.asarray(mask) > 0).astype(np.uint8) * 255


def png_to_mask(img: np.ndarray) -> np.ndarray:
    """Stored {0,255} raster -> {0,1} uint8 mask."""
    arr = np.asarray(img)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return (arr > 127).astype(np.uint8)
