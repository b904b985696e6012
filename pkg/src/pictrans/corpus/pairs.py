"""Construction of style-consistent cross-lingual image pairs.

A pair renders a source text and its translation with one shared
StyleSpec and box over one shared background, plus the auxiliary
channels the backfill model trains on: the glyph image of the target
text, the binary position mask, and the masked source image.

Everything is a pure function of (global_seed, pair_index), so corpora
regenerate byte-identically and shard freely across workers.
"""

from __future__ import annotations

import json
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace, field
from pathlib import Path

import numpy as np

from .. import raster
from ..fonts import FontRegistry, STANDARD_FONT_NAME
from ..seeds import derive_seed, rng_for
from .geometry import TextBox
from .render import (
    TextFitError,
    dilated,
    make_masked_image,
    render_glyph,
    render_position_mask,
    render_text,
)
from .style import StyleSpec, sample_style

CHANNEL_KEYS = ("S", "T", "B", "lg", "lp", "lm")
MAX_PLACEMENT_ATTEMPTS = 12


class PairGenerationError(Exception):
    """A pair could not be rendered; carries the pair id for context."""

    def __init__(self, pair_id: int, cause: Exception):
        self.pair_id = pair_id
        self.cause = cause
        super().__init__(f"pair {pair_id}: {cause}")


@dataclass
class ImagePair:
    source_img: np.ndarray      # S, (H, W, 3)
    target_img: np.ndarray      # T, (H, W, 3)
    background: np.ndarray      # B, (H, W, 3)
    glyph_img: np.ndarray       # (H, W, 1), target text in the standard font
    position_mask: np.ndarray   # (H, W, 1), {0,1}
    masked_img: np.ndarray      # (H, W, 3), S with the box filled
    box: TextBox
    style: StyleSpec
    src_text: str
    tgt_text: str
    src_lang: str
    tgt_lang: str
    pair_id: int
    seed: int

    def channels(self) -> dict[str, np.ndarray]:
        return {
            "S": self.source_img,
            "T": self.target_img,
            "B": self.background,
            "lg": self.glyph_img,
            "lp": self.position_mask,
            "lm": self.masked_img,
        }


def check_pair_invariants(pair: ImagePair) -> list[str]:
    """Return a list of violated invariants (empty when the pair is sound)."""
    problems = []
    h, w = pair.background.shape[:2]
    dil = dilated(pair.box, pair.style).clip(h, w)
    outside = np.ones((h, w), dtype=bool)
    outside[dil.y : dil.y1, dil.x : dil.x1] = False
    if np.any(pair.source_img[outside] != pair.background[outside]):
        problems.append("S differs from B outside the dilated box")
    if np.any(pair.target_img[outside] != pair.background[outside]):
        problems.append("T differs from B outside the dilated box")

    lp = pair.position_mask[:, :, 0]
    expect = np.zeros((h, w), dtype=np.uint8)
    expect[pair.box.y : pair.box.y1, pair.box.x : pair.box.x1] = 1
    if not np.array_equal(lp, expect):
        problems.append("position mask is not exactly the box indicator")

    lm_expect = make_masked_image(pair.source_img, pair.box)
    if not np.array_equal(pair.masked_img, lm_expect):
        problems.append("masked image mismatch")

    ink = pair.glyph_img[:, :, 0] < 255
    if not ink.any():
        problems.append("glyph channel has no ink")
    else:
        covered = (ink & (lp == 1)).sum() / ink.sum()
        if covered < 0.99:
            problems.append(f"only {covered:.3f} of glyph ink inside the box")
    return problems


def _sample_box(rng: np.random.Generator, h: int, w: int) -> TextBox:
    bw = int(rng.integers(round(0.60 * w), round(0.95 * w) + 1))
    bh = int(rng.integers(round(0.35 * h), round(0.70 * h) + 1))
    bx = int(rng.integers(1, max(2, w - bw - 1)))
    by = int(rng.integers(1, max(2, h - bh - 1)))
    return TextBox(bx, by, bw, bh)


def make_pair(
    src_text: str,
    tgt_text: str,
    background: np.ndarray,
    seed: int,
    fonts: FontRegistry,
    src_lang: str = "en",
    tgt_lang: str = "zh",
    pair_id: int = 0,
) -> ImagePair:
    """Render one parallel pair over the given background.

    One StyleSpec, sampled from seed, is used for both the source and the
    target render; both use the same box. If the sampled font lacks
    glyphs for either text, both renders fall back to the standard font
    so the pair stays visually consistent.
    """
    if not src_text.strip() or not tgt_text.strip():
        raise ValueError("source and target texts must be non-empty")
    h, w = background.shape[:2]
    last_err: Exception | None = None
    for attempt in range(MAX_PLACEMENT_ATTEMPTS):
        style = sample_style(derive_seed(seed, "style", attempt), fonts, canvas_px=min(h, w))
        style = replace(style, font_id=fonts.effective_font_id(style.font_id, src_text, tgt_text))
        box = _sample_box(rng_for(seed, "box", attempt), h, w)
        try:
            source = render_text(src_text, style, background, box, fonts)
            target = render_text(tgt_text, style, background, box, fonts)
        except TextFitError as err:
            last_err = err
            continue
        return ImagePair(
            source_img=source,
            target_img=target,
            background=background.copy(),
            glyph_img=render_glyph(tgt_text, box, (h, w), fonts),
            position_mask=render_position_mask(box, (h, w)),
            masked_img=make_masked_image(source, box),
            box=box,
            style=style,
            src_text=src_text,
            tgt_text=tgt_text,
            src_lang=src_lang,
            tgt_lang=tgt_lang,
            pair_id=pair_id,
            seed=seed,
        )
    raise PairGenerationError(pair_id, last_err or TextFitError(src_text, TextBox(0, 0, w, h)))


@dataclass
class ManifestEntry:
    pair_id: int
    paths: dict[str, str]  # channel key -> path relative to the manifest dir
    src_text: str
    tgt_text: str
    box: TextBox
    style: StyleSpec
    seed: int

    def to_dict(self) -> dict:
        return {
            "pair_id": self.pair_id,
            "paths": self.paths,
            "src_text": self.src_text,
            "tgt_text": self.tgt_text,
            "box": self.box.to_dict(),
            "style": self.style.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ManifestEntry":
        return cls(
            pair_id=int(d["pair_id"]),
            paths=dict(d["paths"]),
            src_text=d["src_text"],
            tgt_text=d["tgt_text"],
            box=TextBox.from_dict(d["box"]),
            style=StyleSpec.from_dict(d["style"]),
            seed=int(d["seed"]),
        )


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry]
    global_seed: int
    src_lang: str
    tgt_lang: str
    canvas: int
    root: Path = field(default=Path("."))

    @property
    def count(self) -> int:
        return len(self.entries)

    def save(self, path: Path) -> None:
        path = Path(path)
        header = {
            "kind": "pictrans-corpus",
            "global_seed": self.global_seed,
            "src_lang": self.src_lang,
            "tgt_lang": self.tgt_lang,
            "canvas": self.canvas,
            "count": self.count,
        }
        with path.open("w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, ensure_ascii=False, sort_keys=True) + "\n")
            for entry in self.entries:
                fh.write(json.dumps(entry.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "CorpusManifest":
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header.get("kind") != "pictrans-corpus":
                raise ValueError(f"{path} is not a corpus manifest")
            entries = [ManifestEntry.from_dict(json.loads(line)) for line in fh if line.strip()]
        if len(entries) != header["count"]:
            raise ValueError(
                f"manifest count {header['count']} != {len(entries)} entries present"
            )
        return cls(
            entries=entries,
            global_seed=int(header["global_seed"]),
            src_lang=header["src_lang"],
            tgt_lang=header["tgt_lang"],
            canvas=int(header["canvas"]),
            root=path.parent,
        )

    def load_pair(self, entry: ManifestEntry, src_lang: str | None = None) -> ImagePair:
        """Rehydrate an ImagePair from its rasters on disk."""
        arrs = {k: raster.load_png(self.root / p) for k, p in entry.paths.items()}
        return ImagePair(
            source_img=arrs["S"],
            target_img=arrs["T"],
            background=arrs["B"],
            glyph_img=arrs["lg"],
            position_mask=raster.png_to_mask(arrs["lp"]),
            masked_img=arrs["lm"],
            box=entry.box,
            style=entry.style,
            src_text=entry.src_text,
            tgt_text=entry.tgt_text,
            src_lang=src_lang or self.src_lang,
            tgt_lang=self.tgt_lang,
            pair_id=entry.pair_id,
            seed=entry.seed,
        )


def load_parallel_texts(path: Path) -> list[tuple[str, str]]:
    """Read a UTF-8 tab-separated src<TAB>tgt file, skipping malformed lines."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) >= 2 and parts[0].strip() and parts[1].strip():
            out.append((parts[0].strip(), parts[1].strip()))
    if not out:
        raise ValueError(f"no usable src<TAB>tgt lines in {path}")
    return out


def load_backgrounds(directory: Path) -> list[np.ndarray]:
    """Load every PNG/JPEG under directory, sorted by name for stability."""
    directory = Path(directory)
    files = sorted(
        p for p in directory.iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg", ".bmp")
    )
    if not files:
        raise ValueError(f"no background images under {directory}")
    return [raster.load_png(p) for p in files]


def _crop_background(bg: np.ndarray, canvas: int, rng: np.random.Generator) -> np.ndarray:
    h, w = bg.shape[:2]
    if h < canvas or w < canvas:
        from PIL import Image

        scale = max(canvas / h, canvas / w)
        bg = np.asarray(
            Image.fromarray(bg).resize(
                (max(canvas, int(w * scale)), max(canvas, int(h * scale))),
                Image.Resampling.BILINEAR,
            )
        )
        h, w = bg.shape[:2]
    y = int(rng.integers(0, h - canvas + 1))
    x = int(rng.integers(0, w - canvas + 1))
    return bg[y : y + canvas, x : x + canvas].copy()


def build_pair(
    index: int,
    global_seed: int,
    texts: list[tuple[str, str]],
    backgrounds: list[np.ndarray],
    canvas: int,
    fonts: FontRegistry,
    src_lang: str,
    tgt_lang: str,
) -> ImagePair:
    """Deterministically build pair `index` of a corpus."""
    pair_seed = derive_seed(global_seed, "pair", index)
    rng = rng_for(pair_seed, "select")
    src, tgt = texts[int(rng.integers(len(texts)))]
    bg = _crop_background(backgrounds[int(rng.integers(len(backgrounds)))], canvas, rng)
    try:
        return make_pair(
            src, tgt, bg, pair_seed, fonts,
            src_lang=src_lang, tgt_lang=tgt_lang, pair_id=index,
        )
    except (ValueError, TextFitError) as err:
        raise PairGenerationError(index, err) from err


_WORKER_STATE: dict = {}


def _worker_init(font_dir: str, standard_font: str, texts, bg_arrays, canvas, seed, langs):
    _WORKER_STATE["fonts"] = FontRegistry(Path(font_dir), standard_font=standard_font)
    _WORKER_STATE["texts"] = texts
    _WORKER_STATE["bgs"] = [np.asarray(a, dtype=np.uint8) for a in bg_arrays]
    _WORKER_STATE["canvas"] = canvas
    _WORKER_STATE["seed"] = seed
    _WORKER_STATE["langs"] = langs


def _worker_build(args) -> dict:
    index, out_dir = args
    st = _WORKER_STATE
    pair = build_pair(
        index, st["seed"], st["texts"], st["bgs"], st["canvas"], st["fonts"], *st["langs"]
    )
    return _write_pair(pair, Path(out_dir)).to_dict()


def _write_pair(pair: ImagePair, out_dir: Path) -> ManifestEntry:
    pairs_dir = out_dir / "pairs"
    pairs_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    stored = dict(pair.channels())
    stored["lp"] = raster.mask_to_png(stored["lp"])
    for key in CHANNEL_KEYS:
        rel = f"pairs/{pair.pair_id}_{key}.png"
        raster.save_png(out_dir / rel, stored[key])
        paths[key] = rel
    return ManifestEntry(
        pair_id=pair.pair_id,
        paths=paths,
        src_text=pair.src_text,
        tgt_text=pair.tgt_text,
        box=pair.box,
        style=pair.style,
        seed=pair.seed,
    )


def generate_corpus(
    parallel_texts: list[tuple[str, str]],
    backgrounds: list[np.ndarray],
    count: int,
    global_seed: int,
    out_dir: Path,
    fonts: FontRegistry | None = None,
    src_lang: str = "en",
    tgt_lang: str = "zh",
    canvas: int = 64,
    workers: int = 1,
) -> Path:
    """Write `count` pairs plus manifest.jsonl under out_dir; returns the manifest path.

    Output is identical for any worker count: every pair is a pure
    function of (global_seed, index). On failure, files written by this
    run are removed before the error propagates.
    """
    if not parallel_texts:
        raise ValueError("parallel_texts must be non-empty")
    if not backgrounds:
        raise ValueError("at least one background image is required")
    if count <= 0:
        raise ValueError("count must be positive")
    fonts = fonts or FontRegistry.bundled()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = out_dir / "manifest.jsonl"

    entries: list[ManifestEntry | None] = [None] * count
    try:
        if workers <= 1:
            for i in range(count):
                pair = build_pair(
                    i, global_seed, parallel_texts, backgrounds, canvas, fonts, src_lang, tgt_lang
                )
                entries[i] = _write_pair(pair, out_dir)
        else:
            init_args = (
                str(fonts.font_dir),
                fonts.standard_font,
                parallel_texts,
                backgrounds,
                canvas,
                global_seed,
                (src_lang, tgt_lang),
            )
            with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init,
                                     initargs=init_args) as pool:
                jobs = ((i, str(out_dir)) for i in range(count))
                for i, entry_dict in enumerate(pool.map(_worker_build, jobs, chunksize=16)):
                    entries[i] = ManifestEntry.from_dict(entry_dict)
        manifest = CorpusManifest(
            entries=entries,  # type: ignore[arg-type]
            global_seed=global_seed,
            src_lang=src_lang,
            tgt_lang=tgt_lang,
            canvas=canvas,
            root=out_dir,
        )
        manifest.save(manifest_path)
    except Exception:
        shutil.rmtree(out_dir / "pairs", ignore_errors=True)
        manifest_path.unlink(missing_ok=True)
        raise
    return manifest_path
