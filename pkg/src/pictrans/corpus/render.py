"""Rasterization of styled text, glyph channels, and masks.

All renderers are pure functions of their arguments: same inputs give
byte-identical rasters. Text is composited only inside the target box,
so every pixel outside the box keeps its exact input value.
"""

from __future__ import annotations

import math

import numpy as np
from PIL import Image, ImageDraw

from ..fonts import FontRegistry
from .geometry import TextBox
from .style import StyleSpec

MIN_FONT_PX = 8
ITALIC_SHEAR = 0.25
MASK_FILL_VALUE = 128  # mid-gray fill for the masked-image channel
DILATE_MARGIN_PX = 2  # anti-aliasing allowance beyond outline_px


class RenderError(Exception):
    """Base class for rasterization failures."""


class TextFitError(RenderError):
    """Text cannot be placed inside its box even at the minimum size."""

    def __init__(self, text: str, box: TextBox, context: str = ""):
        self.text = text
        self.box = box
        self.context = context
        suffix = f" ({context})" if context else ""
        super().__init__(
            f"text {text!r} does not fit box {box.w}x{box.h} at {MIN_FONT_PX}px{suffix}"
        )


def dilated(box: TextBox, style: StyleSpec | None = None) -> TextBox:
    """Box grown by the outline width plus the anti-aliasing margin."""
    px = DILATE_MARGIN_PX + (style.outline_px if style is not None else 0)
    return box.dilate(px)


def _is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return (
        0x2E80 <= cp <= 0x9FFF
        or 0x3400 <= cp <= 0x4DBF
        or 0xF900 <= cp <= 0xFAFF
        or 0xFF00 <= cp <= 0xFFEF
    )


def _tokens(text: str) -> list[str]:
    """Wrap units: whitespace-separated words, with CJK split per character."""
    out: list[str] = []
    for word in text.split():
        if any(_is_cjk(c) for c in word):
            run = ""
            for ch in word:
                if _is_cjk(ch):
                    if run:
                        out.append(run)
                        run = ""
                    out.append(ch)
                else:
                    run += ch
            if run:
                out.append(run)
        else:
            out.append(word)
    return out


def _joiner(a: str, b: str) -> str:
    # no space when joining adjacent CJK units back together
    if a and b and _is_cjk(a[-1]) and _is_cjk(b[0]):
        return ""
    return " "


def _wrap(tokens: list[str], measure, budget_w: int) -> list[str]:
    """Greedy wrap: accumulate tokens while the line stays inside budget_w."""
    lines: list[str] = []
    cur = ""
    for tok in tokens:
        cand = cur + _joiner(cur, tok) + tok if cur else tok
        if cur and measure(cand) > budget_w:
            lines.append(cur)
            cur = tok
        else:
            cur = cand
    if cur:
        lines.append(cur)
    return lines


def _rotated_extent(w: float, h: float, angle_deg: float) -> tuple[float, float]:
    a = abs(math.radians(angle_deg))
    return (w * math.cos(a) + h * math.sin(a), w * math.sin(a) + h * math.cos(a))


def _block_bbox(draw, wrapped: str, font, stroke: int) -> tuple[int, int, int, int]:
    return draw.multiline_textbbox((0, 0), wrapped, font=font, stroke_width=stroke, align="center")


def _fit(text: str, box: TextBox, font_id: str, fonts: FontRegistry, start_px: int,
         stroke: int, shear: float, angle: float):
    """Find the largest size <= start_px whose wrapped block fits the box.

    Returns (font, wrapped_text, block_bbox). The fit accounts for outline
    width, italic shear, and rotation of the whole block.
    """
    probe = ImageDraw.Draw(Image.new("L", (4, 4)))
    toks = _tokens(text)
    size = max(start_px, MIN_FONT_PX)
    while size >= MIN_FONT_PX:
        font = fonts.load(font_id, size)

        def width_of(s: str) -> float:
            b = probe.textbbox((0, 0), s, font=font, stroke_width=stroke)
            return b[2] - b[0]

        wrapped = "\n".join(_wrap(toks, width_of, box.w))
        bb = _block_bbox(probe, wrapped, font, stroke)
        bw = math.ceil(bb[2] - bb[0])
        bh = math.ceil(bb[3] - bb[1])
        if bw > 0 and bh > 0:
            sw = bw + shear * bh
            rw, rh = _rotated_extent(sw, bh, angle)
            if rw <= box.w and rh <= box.h:
                return font, wrapped, bb
        size -= 1
    raise TextFitError(text, box)


def _render_layer(wrapped: str, font, bb, color, stroke: int, stroke_fill,
                  shear: float, angle: float) -> Image.Image:
    """Rasterize a text block onto a tight transparent RGBA layer."""
    bw = int(math.ceil(bb[2] - bb[0]))
    bh = int(math.ceil(bb[3] - bb[1]))
    layer = Image.new("RGBA", (bw, bh), (0, 0, 0, 0))
    draw = ImageDraw.Draw(layer)
    draw.multiline_text(
        (-bb[0], -bb[1]),
        wrapped,
        font=font,
        fill=tuple(color),
        stroke_width=stroke,
        stroke_fill=stroke_fill,
        align="center",
    )
    if shear:
        new_w = bw + int(math.ceil(shear * bh))
        # output->input affine: x_in = x_out - shear*(bh - y)
        layer = layer.transform(
            (new_w, bh),
            Image.Transform.AFFINE,
            (1.0, shear, -shear * bh, 0.0, 1.0, 0.0),
            resample=Image.Resampling.BILINEAR,
        )
    if angle:
        layer = layer.rotate(angle, expand=True, resample=Image.Resampling.BICUBIC)
    return layer


def _contrast_color(color) -> tuple[int, int, int, int]:
    r, g, b = color[0], color[1], color[2]
    lum = 0.299 * r + 0.587 * g + 0.114 * b
    v = 0 if lum > 127.5 else 255
    return (v, v, v, color[3] if len(color) > 3 else 255)


def _composite_in_box(canvas: np.ndarray, layer: Image.Image, box: TextBox) -> np.ndarray:
    """Alpha-composite layer centered on the box, cropped to box bounds."""
    h, w = canvas.shape[:2]
    lw, lh = layer.size
    cx = box.x + box.w / 2.0
    cy = box.y + box.h / 2.0
    px = int(round(cx - lw / 2.0))
    py = int(round(cy - lh / 2.0))
    # crop the layer so nothing lands outside the box
    crop_x0 = max(box.x - px, 0)
    crop_y0 = max(box.y - py, 0)
    crop_x1 = min(box.x1 - px, lw)
    crop_y1 = min(box.y1 - py, lh)
    if crop_x1 <= crop_x0 or crop_y1 <= crop_y0:
        return canvas.copy()
    layer = layer.crop((crop_x0, crop_y0, crop_x1, crop_y1))
    dest = (px + crop_x0, py + crop_y0)

    region_box = TextBox(dest[0], dest[1], layer.size[0], layer.size[1]).clip(h, w)
    out = canvas.copy()
    region = Image.fromarray(out[region_box.y : region_box.y1, region_box.x : region_box.x1]).convert("RGBA")
    region.alpha_composite(layer, (region_box.x - dest[0], region_box.y - dest[1]))
    out[region_box.y : region_box.y1, region_box.x : region_box.x1] = np.asarray(region.convert("RGB"))
    return out


def render_text(
    text: str,
    style: StyleSpec,
    canvas: np.ndarray,
    box: TextBox,
    fonts: FontRegistry,
) -> np.ndarray:
    """Draw styled text into box on a copy of canvas.

    The text is shrunk/wrapped to fit, sheared when italic, and rotated
    about the box center. Fonts lacking a needed glyph fall back to the
    registry's standard font for the whole string.
    """
    if not text or not text.strip():
        raise ValueError("text must be non-empty")
    h, w = canvas.shape[:2]
    if not box.inside_canvas(h, w):
        raise ValueError(f"box {box} outside {w}x{h} canvas")
    font_id = fonts.effective_font_id(style.font_id, text)
    shear = ITALIC_SHEAR if style.italic else 0.0
    font, wrapped, bb = _fit(
        text, box, font_id, fonts, style.size_px, style.outline_px, shear, style.rotation_deg
    )
    layer = _render_layer(
        wrapped, font, bb, style.color, style.outline_px,
        _contrast_color(style.color), shear, style.rotation_deg,
    )
    return _composite_in_box(canvas, layer, box)


def render_glyph(
    text: str,
    box: TextBox,
    canvas_dims: tuple[int, int],
    fonts: FontRegistry,
) -> np.ndarray:
    """Glyph channel: text in the standard font, black on white, centered in box.

    Independent of any StyleSpec; shape (H, W, 1) uint8.
    """
    if not text or not text.strip():
        raise ValueError("text must be non-empty")
    h, w = canvas_dims
    if not box.inside_canvas(h, w):
        raise ValueError(f"box {box} outside {w}x{h} canvas")
    font, wrapped, bb = _fit(
        text, box, fonts.standard_font, fonts, start_px=box.h, stroke=0, shear=0.0, angle=0.0
    )
    canvas = np.full((h, w, 3), 255, dtype=np.uint8)
    layer = _render_layer(wrapped, font, bb, (0, 0, 0, 255), 0, None, 0.0, 0.0)
    out = _composite_in_box(canvas, layer, box)
    return out[:, :, :1].copy()


def render_position_mask(box: TextBox, canvas_dims: tuple[int, int]) -> np.ndarray:
    """{0,1} mask, 1 inside box; shape (H, W, 1) uint8."""
    h, w = canvas_dims
    if not box.inside_canvas(h, w):
        raise ValueError(f"box {box} outside {w}x{h} canvas")
    mask = np.zeros((h, w, 1), dtype=np.uint8)
    mask[box.y : box.y1, box.x : box.x1] = 1
    return mask


def make_masked_image(img: np.ndarray, box: TextBox) -> np.ndarray:
    """Copy of img with the box region replaced by the constant fill value."""
    h, w = img.shape[:2]
    box = box.clip(h, w)
    out = img.copy()
    out[box.y : box.y1, box.x : box.x1] = MASK_FILL_VALUE
    return out
