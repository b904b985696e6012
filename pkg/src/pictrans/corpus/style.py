"""Text style sampling.

A StyleSpec pins every visual attribute that must stay identical between
the two renders of a parallel pair: font, size, color, synthetic italic,
rotation, and outline width. Sampling is a pure function of its seed.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from ..fonts import FontRegistry

SIZE_RANGE_AT_64 = (12, 48)  # sampled size bounds at a 64x64 canvas, scaled linearly
ROTATION_MAX_DEG = 15.0
OUTLINE_CHOICES = (0, 0, 0, 0, 0, 0, 0, 1, 1, 2)  # mostly no outline


@dataclass(frozen=True)
class StyleSpec:
    font_id: str
    size_px: int
    color: tuple[int, int, int, int]  # RGBA
    italic: bool
    rotation_deg: float
    outline_px: int

    def __post_init__(self):
        if self.size_px < 8:
            raise ValueError(f"size_px must be >= 8, got {self.size_px}")
        if not -ROTATION_MAX_DEG <= self.rotation_deg <= ROTATION_MAX_DEG:
            raise ValueError(f"rotation {self.rotation_deg} outside +-{ROTATION_MAX_DEG} deg")
        if self.outline_px < 0:
            raise ValueError("outline_px must be non-negative")
        if len(self.color) != 4 or any(not 0 <= c <= 255 for c in self.color):
            raise ValueError(f"color must be 8-bit RGBA, got {self.color}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["color"] = list(self.color)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "StyleSpec":
        return cls(
            font_id=d["font_id"],
            size_px=int(d["size_px"]),
            color=tuple(int(c) for c in d["color"]),
            italic=bool(d["italic"]),
            rotation_deg=float(d["rotation_deg"]),
            outline_px=int(d["outline_px"]),
        )


def sample_style(rng_seed: int, fonts: FontRegistry, canvas_px: int = 64) -> StyleSpec:
    """Sample a StyleSpec deterministically from rng_seed.

    Fonts are drawn uniformly over the registry, colors over full RGB,
    sizes over [12, 48] px scaled by canvas_px / 64.
    """
    ids = fonts.font_ids
    if not ids:
        raise ValueError("font registry is empty")
    rng = np.random.default_rng(int(rng_seed) & 0xFFFFFFFFFFFFFFFF)
    lo = max(8, round(SIZE_RANGE_AT_64[0] * canvas_px / 64))
    hi = max(lo + 1, round(SIZE_RANGE_AT_64[1] * canvas_px / 64))
    return StyleSpec(
        font_id=ids[int(rng.integers(len(ids)))],
        size_px=int(rng.integers(lo, hi + 1)),
        color=(
            int(rng.integers(256)),
            int(rng.integers(256)),
            int(rng.integers(256)),
            255,
        ),
        italic=bool(rng.integers(2)),
        rotation_deg=float(rng.uniform(-ROTATION_MAX_DEG, ROTATION_MAX_DEG)),
        outline_px=int(OUTLINE_CHOICES[int(rng.integers(len(OUTLINE_CHOICES)))]),
    )
