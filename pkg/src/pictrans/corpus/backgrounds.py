"""Procedural smooth backgrounds for tests and demos.

Low-frequency color fields stand in for the photographs a production
corpus would crop. Smoothness matters: the naive text eraser assumes
locally predictable backgrounds.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import raster


def make_background(seed: int, size: int = 256) -> np.ndarray:
    """One smooth RGB background: corner-interpolated gradient plus soft blobs."""
    rng = np.random.default_rng(seed)
    yy, xx = np.meshgrid(np.linspace(0, 1, size), np.linspace(0, 1, size), indexing="ij")
    corners = rng.uniform(30, 225, size=(2, 2, 3))
    img = (
        corners[0, 0] * (1 - yy)[..., None] * (1 - xx)[..., None]
        + corners[0, 1] * (1 - yy)[..., None] * xx[..., None]
        + corners[1, 0] * yy[..., None] * (1 - xx)[..., None]
        + corners[1, 1] * yy[..., None] * xx[..., None]
    )
    for _ in range(int(rng.integers(1, 4))):
        cy, cx = rng.uniform(0, 1, 2)
        sigma = rng.uniform(0.15, 0.45)
        amp = rng.uniform(-40, 40, 3)
        blob = np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * sigma**2))
        img = img + blob[..., None] * amp
    return np.clip(img, 0, 255).astype(np.uint8)


def generate_default_backgrounds(directory: Path, count: int = 8, size: int = 256,
                                 seed: int = 0) -> list[Path]:
    """Write `count` seeded backgrounds into directory; returns the file paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(count):
        p = directory / f"bg_{i:03d}.png"
        raster.save_png(p, make_background(seed * 1000003 + i, size))
        paths.append(p)
    return paths
