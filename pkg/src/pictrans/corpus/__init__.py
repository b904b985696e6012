"""Synthetic parallel text-image corpus generation."""

from .backgrounds import generate_default_backgrounds, make_background
from .geometry import TextBox
from .pairs import (
    CorpusManifest,
    ImagePair,
    ManifestEntry,
    PairGenerationError,
    build_pair,
    check_pair_invariants,
    generate_corpus,
    load_backgrounds,
    load_parallel_texts,
    make_pair,
)
from .render import (
    MASK_FILL_VALUE,
    RenderError,
    TextFitError,
    dilated,
    make_masked_image,
    render_glyph,
    render_position_mask,
    render_text,
)
from .style import StyleSpec, sample_style

__all__ = [
    "CorpusManifest",
    "ImagePair",
    "ManifestEntry",
    "MASK_FILL_VALUE",
    "PairGenerationError",
    "RenderError",
    "StyleSpec",
    "TextBox",
    "TextFitError",
    "build_pair",
    "check_pair_invariants",
    "dilated",
    "generate_corpus",
    "generate_default_backgrounds",
    "load_backgrounds",
    "load_parallel_texts",
    "make_background",
    "make_masked_image",
    "make_pair",
    "render_glyph",
    "render_position_mask",
    "render_text",
    "sample_style",
]
