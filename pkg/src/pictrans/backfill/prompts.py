"""Rule-based generation prompts for the backfill model."""

from __future__ import annotations

_TEMPLATES = {
    "zh": '图片上渲染文字 "{text}"',
    "en": 'Text "{text}" rendered on the image',
    "fr": 'Texte "{text}" rendu sur l\'image',
    "de": 'Text "{text}" auf dem Bild dargestellt',
}


def build_region_prompt(translation: str, tgt_lang: str) -> str:
    """Deterministic generation prompt quoting the translated text."""
    if not translation or not translation.strip():
        raise ValueError("translation must be non-empty")
    template = _TEMPLATES.get(tgt_lang, _TEMPLATES["en"])
    return template.format(text=translation)
