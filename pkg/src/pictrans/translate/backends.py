"""Translator backends: a deterministic mock and a remote HTTP client.

The mock stands in for a multimodal LLM in tests and demos. It resolves
ambiguous words through per-image context tags, but only when the prompt
actually contains the scene-description step; without that step it falls
back to context-free defaults. That asymmetry is the point: it makes the
value of scene-aware prompting observable in a fully deterministic way.
"""

from __future__ import annotations

import base64
import json
import os
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .regions import TextRegion

DEFAULT_PAIRS = frozenset(
    {("en", "zh"), ("en", "fr"), ("en", "de"), ("zh", "en"), ("fr", "en"), ("de", "en")}
)


class BackendError(Exception):
    """Backend call failed; `retriable` says whether a retry may help."""

    def __init__(self, message: str, retriable: bool = False):
        self.retriable = retriable
        super().__init__(message)


class LanguagePairError(BackendError):
    def __init__(self, src: str, tgt: str, backend_id: str):
        super().__init__(f"backend {backend_id} does not support {src}-{tgt}", retriable=False)


@dataclass(frozen=True)
class MockScene:
    """Deterministic stand-in for image understanding."""

    image_ref: str
    context_tags: frozenset[str]
    lexicon: dict  # (src_text, context_tag) -> {tgt_lang: translation}

    def describe(self) -> str:
        return "scene with " + ", ".join(sorted(self.context_tags))


@dataclass
class MockSceneSet:
    scenes: dict[str, MockScene]
    default_lexicon: dict  # src_text -> {tgt_lang: translation}

    @classmethod
    def from_json(cls, path: Path) -> "MockSceneSet":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        scenes = {}
        for ref, spec in doc.get("scenes", {}).items():
            lex = {}
            for key, translations in spec.get("lexicon", {}).items():
                text, tag = key.split("|", 1)
                lex[(text, tag)] = dict(translations)
            scenes[ref] = MockScene(
                image_ref=ref,
                context_tags=frozenset(spec.get("context_tags", [])),
                lexicon=lex,
            )
        return cls(scenes=scenes, default_lexicon=dict(doc.get("default_lexicon", {})))

    @classmethod
    def bundled(cls) -> "MockSceneSet":
        return cls.from_json(resources.files("pictrans") / "data" / "mock_scenes.json")

    def scene_for(self, image_ref: str | None) -> MockScene | None:
        if image_ref is None:
            return None
        return self.scenes.get(Path(str(image_ref)).stem)


class TranslatorBackend:
    """Interface: produce a raw response string for (image, prompt, region)."""

    backend_id: str = "base"
    mode: str = "mock"  # or "remote"
    supported_pairs: frozenset = DEFAULT_PAIRS

    def supports(self, src_lang: str, tgt_lang: str) -> bool:
        return (src_lang, tgt_lang) in self.supported_pairs

    def check_pair(self, src_lang: str, tgt_lang: str) -> None:
        if not self.supports(src_lang, tgt_lang):
            raise LanguagePairError(src_lang, tgt_lang, self.backend_id)

    def translate_raw(self, image_ref, prompt: str, region: TextRegion,
                      src_lang: str, tgt_lang: str) -> str:
        raise NotImplementedError


@dataclass
class MockTranslatorBackend(TranslatorBackend):
    """Pure function of (scene tags, recognized text, prompt shape)."""

    scene_set: MockSceneSet = field(default_factory=MockSceneSet.bundled)
    backend_id: str = "mock"
    mode: str = "mock"
    supported_pairs: frozenset = DEFAULT_PAIRS

    def _lookup(self, text: str, tgt_lang: str, scene: MockScene | None, use_scene: bool) -> str:
        if use_scene and scene is not None:
            for tag in sorted(scene.context_tags):
                hit = scene.lexicon.get((text, tag))
                if hit and tgt_lang in hit:
                    return hit[tgt_lang]
        default = self.scene_set.default_lexicon.get(text, {})
        return default.get(tgt_lang, text)

    def translate_raw(self, image_ref, prompt: str, region: TextRegion,
                      src_lang: str, tgt_lang: str) -> str:
        self.check_pair(src_lang, tgt_lang)
        scene = self.scene_set.scene_for(image_ref)
        cot_on = "1:" in prompt  # scene-description step requested
        text = region.recognized_text
        translation = self._lookup(text, tgt_lang, scene, use_scene=cot_on)
        if cot_on:
            desc = scene.describe() if scene else "scene without context"
            return f"1: {desc}\n2: {text}\n3: {translation}"
        return translation


@dataclass(frozen=True)
class RemoteBackendConfig:
    endpoint: str
    model: str = "default"
    auth_env: str = "PICTRANS_BACKEND_TOKEN"
    timeout_s: float = 30.0


@dataclass
class RemoteTranslatorBackend(TranslatorBackend):
    """JSON-over-HTTP client for a multimodal translation service.

    Request: {model, prompt, box, image_b64}; response: {"text": ...}.
    """

    config: RemoteBackendConfig = None  # type: ignore[assignment]
    backend_id: str = "remote"
    mode: str = "remote"
    supported_pairs: frozenset = DEFAULT_PAIRS

    def translate_raw(self, image_ref, prompt: str, region: TextRegion,
                      src_lang: str, tgt_lang: str) -> str:
        self.check_pair(src_lang, tgt_lang)
        payload = {
            "model": self.config.model,
            "prompt": prompt,
            "box": [region.box.x, region.box.y, region.box.w, region.box.h],
        }
        if image_ref is not None and Path(str(image_ref)).is_file():
            payload["image_b64"] = base64.b64encode(Path(image_ref).read_bytes()).decode("ascii")
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.config.auth_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        req = urllib.request.Request(
            self.config.endpoint, data=json.dumps(payload).encode("utf-8"),
            headers=headers, method="POST",
        )
        try:
            with urllib.request.urlopen(req, timeout=self.config.timeout_s) as resp:
                body = resp.read().decode("utf-8")
        except urllib.error.HTTPError as err:
            raise BackendError(f"backend HTTP {err.code}", retriable=err.code >= 500) from err
        except (urllib.error.URLError, TimeoutError, OSError) as err:
            raise BackendError(f"backend unreachable: {err}", retriable=True) from err
        try:
            doc = json.loads(body)
            return str(doc["text"])
        except (json.JSONDecodeError, KeyError) as err:
            raise BackendError(f"malformed backend payload: {body[:200]!r}", retriable=False) from err
