"""Stage 1: per-region text recognition and scene-aware translation."""

from .backends import (
    BackendError,
    LanguagePairError,
    MockScene,
    MockSceneSet,
    MockTranslatorBackend,
    RemoteBackendConfig,
    RemoteTranslatorBackend,
    TranslatorBackend,
)
from .prompts import (
    ResponseParseError,
    SUPPORTED_LANGS,
    UnsupportedLanguageError,
    build_cot_prompt,
    build_plain_prompt,
    parse_cot_response,
)
from .regions import (
    ContrastRegionDetector,
    ManifestRegionProvider,
    RegionProviderError,
    TextRegion,
    detect_regions,
)
from .service import (
    RegionTranslationError,
    TranslationResult,
    translate_region,
    translate_regions,
)

__all__ = [
    "BackendError",
    "ContrastRegionDetector",
    "LanguagePairError",
    "ManifestRegionProvider",
    "MockScene",
    "MockSceneSet",
    "MockTranslatorBackend",
    "RegionProviderError",
    "RegionTranslationError",
    "RemoteBackendConfig",
    "RemoteTranslatorBackend",
    "ResponseParseError",
    "SUPPORTED_LANGS",
    "TextRegion",
    "TranslationResult",
    "TranslatorBackend",
    "UnsupportedLanguageError",
    "build_cot_prompt",
    "build_plain_prompt",
    "detect_regions",
    "parse_cot_response",
    "translate_region",
    "translate_regions",
]
