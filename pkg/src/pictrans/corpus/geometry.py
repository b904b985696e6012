"""Axis-aligned text boxes on integer pixel grids."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class TextBox:
    """Axis-aligned box; (x, y) is the top-left corner, w/h in pixels."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"degenerate box {self}")

    @property
    def x1(self) -> int:
        return self.x + self.w

    @property
    def y1(self) -> int:
        return self.y + self.h

    def area(self) -> int:
        return self.w * self.h

    def contains(self, other: "TextBox") -> bool:
        return (
            self.x <= other.x
            and self.y <= other.y
            and other.x1 <= self.x1
            and other.y1 <= self.y1
        )

    def inside_canvas(self, height: int, width: int) -> bool:
        return 0 <= self.x and 0 <= self.y and self.x1 <= width and self.y1 <= height

    def dilate(self, px: int) -> "TextBox":
        """Expand by px on every side (no clipping)."""
        return TextBox(self.x - px, self.y - px, self.w + 2 * px, self.h + 2 * px)

    def clip(self, height: int, width: int) -> "TextBox":
        """Intersect with the canvas; raises if the intersection is empty."""
        x0 = max(self.x, 0)
        y0 = max(self.y, 0)
        x1 = min(self.x1, width)
        y1 = min(self.y1, height)
        if x1 <= x0 or y1 <= y0:
            raise ValueError(f"box {self} falls outside a {width}x{height} canvas")
        return TextBox(x0, y0, x1 - x0, y1 - y0)

    def overlaps(self, other: "TextBox") -> bool:
        return not (
            self.x1 <= other.x
            or other.x1 <= self.x
            or self.y1 <= other.y
            or other.y1 <= self.y
        )

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @classmethod
    def from_dict(cls, d: dict) -> "TextBox":
        return cls(int(d["x"]), int(d["y"]), int(d["w"]), int(d["h"]))
