"""Region translation: prompt, call, parse, with ordered concurrency."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .backends import BackendError, TranslatorBackend
from .prompts import build_cot_prompt, build_plain_prompt, parse_cot_response
from .regions import TextRegion

REMOTE_RETRIES = 2
BACKOFF_BASE_S = 0.5
MIN_COT_STEPS = 3


class RegionTranslationError(Exception):
    """Translation of one region failed after retries; carries its index."""

    def __init__(self, region_index: int, cause: Exception):
        self.region_index = region_index
        self.cause = cause
        super().__init__(f"region {region_index}: {cause}")


@dataclass(frozen=True)
class TranslationResult:
    region: TextRegion
    translation: str
    cot_trace: tuple[str, ...] = field(default_factory=tuple)
    backend_id: str = ""

    def __post_init__(self):
        if not self.translation:
            raise ValueError("translation must be non-empty on success")


def translate_region(
    image_ref,
    region: TextRegion,
    backend: TranslatorBackend,
    src_lang: str,
    tgt_lang: str,
    cot: bool = True,
    region_index: int = 0,
    sleep=time.sleep,
) -> TranslationResult:
    """Translate one region through the backend.

    Remote backends are retried twice with exponential backoff on
    retriable errors; the mock is never retried.
    """
    backend.check_pair(src_lang, tgt_lang)
    prompt = (
        build_cot_prompt(src_lang, tgt_lang, region)
        if cot
        else build_plain_prompt(src_lang, tgt_lang, region)
    )
    attempts = 1 + (REMOTE_RETRIES if backend.mode == "remote" else 0)
    last: Exception | None = None
    for attempt in range(attempts):
        try:
            raw = backend.translate_raw(image_ref, prompt, region, src_lang, tgt_lang)
            break
        except BackendError as err:
            last = err
            if not err.retriable or attempt == attempts - 1:
                raise RegionTranslationError(region_index, err) from err
            sleep(BACKOFF_BASE_S * 2**attempt)
    else:  # pragma: no cover - loop always breaks or raises
        raise RegionTranslationError(region_index, last)

    if cot:
        steps, final = parse_cot_response(raw)
        trace = tuple(steps) + (final,)
        if len(trace) < MIN_COT_STEPS:
            trace = trace + ("",) * (MIN_COT_STEPS - len(trace))
    else:
        final = raw.strip()
        trace = ()
    return TranslationResult(
        region=region, translation=final, cot_trace=trace, backend_id=backend.backend_id
    )


def translate_regions(
    image_ref,
    regions: list[TextRegion],
    backend: TranslatorBackend,
    src_lang: str,
    tgt_lang: str,
    cot: bool = True,
    max_workers: int = 4,
) -> list[TranslationResult | RegionTranslationError]:
    """Translate all regions of one image, results in input order.

    Failed regions come back as their error value so callers can skip
    them without losing the rest of the image.
    """
    if not regions:
        return []

    def job(idx_region):
        idx, region = idx_region
        try:
            return translate_region(
                image_ref, region, backend, src_lang, tgt_lang, cot=cot, region_index=idx
            )
        except (RegionTranslationError, Exception) as err:
            if isinstance(err, RegionTranslationError):
                return err
            return RegionTranslationError(idx, err)

    if len(regions) == 1 or max_workers <= 1:
        return [job(x) for x in enumerate(regions)]
    with ThreadPoolExecutor(max_workers=min(max_workers, len(regions))) as pool:
        return list(pool.map(job, enumerate(regions)))
