"""Text region detection: ground-truth and heuristic providers."""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from ..corpus.geometry import TextBox
from ..corpus.pairs import CorpusManifest


@dataclass(frozen=True)
class TextRegion:
    box: TextBox
    recognized_text: str = ""
    confidence: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if not self.recognized_text and self.confidence != 0.0:
            raise ValueError("empty recognized_text requires confidence 0")


class RegionProviderError(Exception):
    pass


@dataclass
class ManifestRegionProvider:
    """Ground-truth boxes and texts for synthetic corpus images.

    Image references are matched to pairs by the leading integer of the
    file stem ("12.png", "12_S.png" -> pair 12).
    """

    manifest: CorpusManifest
    _by_id: dict = field(init=False, repr=False)

    def __post_init__(self):
        self._by_id = {e.pair_id: e for e in self.manifest.entries}

    def detect(self, image: np.ndarray, image_ref: str | None = None) -> list[TextRegion]:
        if image_ref is None:
            raise RegionProviderError("ground-truth provider needs an image reference")
        m = re.match(r"(\d+)", Path(image_ref).stem)
        if not m or int(m.group(1)) not in self._by_id:
            raise RegionProviderError(f"no manifest entry matches {image_ref!r}")
        entry = self._by_id[int(m.group(1))]
        return [TextRegion(box=entry.box, recognized_text=entry.src_text, confidence=1.0)]


@dataclass
class ContrastRegionDetector:
    """Naive detector: boxes around connected high-gradient blobs.

    Good enough for synthetic imagery on smooth backgrounds; real scenes
    belong to an OCR provider plugged in through the same interface.
    """

    grad_threshold: float = 24.0
    min_area: int = 30
    dilate_px: int = 3

    def detect(self, image: np.ndarray, image_ref: str | None = None) -> list[TextRegion]:
        gray = image.astype(np.float64).mean(axis=2) if image.ndim == 3 else image.astype(np.float64)
        gy = np.abs(np.diff(gray, axis=0, prepend=gray[:1]))
        gx = np.abs(np.diff(gray, axis=1, prepend=gray[:, :1]))
        edges = np.maximum(gx, gy) > self.grad_threshold
        if not edges.any():
            return []
        blob = ndimage.binary_dilation(edges, iterations=self.dilate_px)
        labels, n = ndimage.label(blob)
        regions = []
        for sl in ndimage.find_objects(labels):
            h = sl[0].stop - sl[0].start
            w = sl[1].stop - sl[1].start
            if w * h < self.min_area or w < 3 or h < 3:
                continue
            regions.append(
                TextRegion(box=TextBox(sl[1].start, sl[0].start, w, h), recognized_text="", confidence=0.0)
            )
        regions.sort(key=lambda r: (r.box.y, r.box.x))
        return regions


def detect_regions(image: np.ndarray, provider, image_ref: str | None = None) -> list[TextRegion]:
    """Run a provider; on provider failure warn and return no regions.

    A failed detection downgrades the image to pass-through rather than
    aborting the pipeline.
    """
    try:
        return provider.detect(image, image_ref=image_ref)
    except Exception as err:  # provider contract: never take the pipeline down
        warnings.warn(f"region provider failed ({err}); image passes through untranslated")
        return []
