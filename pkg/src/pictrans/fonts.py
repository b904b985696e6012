"""Font registry: discovery, loading, and glyph coverage.

A registry is built from a directory of TTF/OTF files. Font ids are the
file stems, sorted, so the id -> file mapping is stable across runs and
machines; seeded sampling stays reproducible. One font is designated the
"standard" font used for glyph-channel rendering; the bundled default is
Noto Sans SC, which covers Latin and CJK.

Coverage checks read the font's cmap table directly (formats 4 and 12)
instead of trusting rendered .notdef boxes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from PIL import ImageFont


class FontConfigError(Exception):
    """Raised when the font set cannot be assembled."""


def bundled_font_dir() -> Path:
    """Directory of fonts shipped with the package."""
    return Path(resources.files("pictrans") / "fonts")


STANDARD_FONT_NAME = "NotoSansSC-Regular"


def _read_cmap_codepoints(path: Path) -> set[int]:
    """Parse the set of mapped unicode codepoints from a TTF/OTF cmap."""
    data = path.read_bytes()
    (num_tables,) = struct.unpack_from(">H", data, 4)
    cmap_off = None
    for i in range(num_tables):
        tag, _chk, off, _len = struct.unpack_from(">4sIII", data, 12 + 16 * i)
        if tag == b"cmap":
            cmap_off = off
            break
    if cmap_off is None:
        return set()
    (_ver, n_sub) = struct.unpack_from(">HH", data, cmap_off)
    # prefer a UCS-4 subtable (3,10), else BMP (3,1), else (0,*)
    best = None
    best_rank = -1
    for i in range(n_sub):
        pid, eid, sub_off = struct.unpack_from(">HHI", data, cmap_off + 4 + 8 * i)
        rank = {(3, 10): 3, (3, 1): 2, (0, 4): 1, (0, 3): 1}.get((pid, eid), 0)
        if rank > best_rank:
            best_rank, best = rank, cmap_off + sub_off
    if best is None:
        return set()
    (fmt,) = struct.unpack_from(">H", data, best)
    cps: set[int] = set()
    if fmt == 4:
        (seg_x2,) = struct.unpack_from(">H", data, best + 6)
        segs = seg_x2 // 2
        ends = struct.unpack_from(f">{segs}H", data, best + 14)
        starts = struct.unpack_from(f">{segs}H", data, best + 16 + seg_x2)
        for s, e in zip(starts, ends):
            if s == 0xFFFF:
                continue
            cps.update(range(s, e + 1))
    elif fmt == 12:
        (n_groups,) = struct.unpack_from(">I", data, best + 12)
        for g in range(n_groups):
            s, e, _gid = struct.unpack_from(">III", data, best + 16 + 12 * g)
            cps.update(range(s, e + 1))
    return cps


@dataclass
class FontRegistry:
    """Loadable fonts under a directory, addressed by stable font_id."""

    font_dir: Path
    standard_font: str = STANDARD_FONT_NAME
    _paths: dict[str, Path] = field(default_factory=dict, repr=False)
    _coverage: dict[str, set[int]] = field(default_factory=dict, repr=False)
    _loaded: dict[tuple[str, int], ImageFont.FreeTypeFont] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.font_dir = Path(self.font_dir)
        files = sorted(
            p for p in self.font_dir.rglob("*") if p.suffix.lower() in (".ttf", ".otf")
        )
        self._paths = {p.stem: p for p in files}
        if not self._paths:
            raise FontConfigError(f"no TTF/OTF fonts found under {self.font_dir}")
        if self.standard_font not in self._paths:
            raise FontConfigError(
                f"standard font {self.standard_font!r} not present under {self.font_dir}"
            )

    @classmethod
    def bundled(cls) -> "FontRegistry":
        return cls(bundled_font_dir())

    @property
    def font_ids(self) -> list[str]:
        return sorted(self._paths)

    def path(self, font_id: str) -> Path:
        try:
            return self._paths[font_id]
        except KeyError:
            raise FontConfigError(f"unknown font_id {font_id!r}") from None

    def load(self, font_id: str, size_px: int) -> ImageFont.FreeTypeFont:
        key = (font_id, int(size_px))
        if key not in self._loaded:
            self._loaded[key] = ImageFont.truetype(str(self.path(font_id)), int(size_px))
        return self._loaded[key]

    def covers(self, font_id: str, text: str) -> bool:
        """True if every non-space character of text has a cmap entry."""
        if font_id not in self._coverage:
            self._coverage[font_id] = _read_cmap_codepoints(self.path(font_id))
        cps = self._coverage[font_id]
        return all(ord(ch) in cps for ch in text if not ch.isspace())

    def effective_font_id(self, font_id: str, *texts: str) -> str:
        """font_id if it covers all given texts, else the standard fallback."""
        if all(self.covers(font_id, t) for t in texts):
            return font_id
        return self.standard_font
