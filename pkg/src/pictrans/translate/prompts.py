"""Prompt construction and response parsing for region translation.

Chain-of-thought prompts are written in the TARGET language (that
measurably works better than source-language prompts for this task) and
mandate three numbered steps: describe the scene, state the recognized
text, translate it consistently with the scene. Responses use the same
"N:" step markers, which the parser relies on.
"""

from __future__ import annotations

import re

from .regions import TextRegion

SUPPORTED_LANGS = ("en", "zh", "fr", "de")

LANG_NAMES = {
    "en": {"en": "English", "zh": "英语", "fr": "anglais", "de": "Englisch"},
    "zh": {"en": "Chinese", "zh": "中文", "fr": "chinois", "de": "Chinesisch"},
    "fr": {"en": "French", "zh": "法语", "fr": "français", "de": "Französisch"},
    "de": {"en": "German", "zh": "德语", "fr": "allemand", "de": "Deutsch"},
}


class UnsupportedLanguageError(Exception):
    pass


class ResponseParseError(Exception):
    """Backend response had no usable step markers; raw payload retained."""

    def __init__(self, message: str, raw: str):
        self.raw = raw
        super().__init__(f"{message}: {raw[:200]!r}")


_COT_TEMPLATES = {
    "zh": (
        "请结合图片完成翻译任务。需要翻译的{src_name}文字位于方框 {box} 内。\n"
        "请严格按照以下三个步骤回答，并使用同样的编号标记:\n"
        "1: 描述图片中的场景。\n"
        "2: 说出方框内识别到的文字。\n"
        "3: 给出与场景含义一致的中文翻译。"
    ),
    "en": (
        "Use the image to translate the {src_name} text inside the box {box}.\n"
        "Answer in exactly three numbered steps, keeping the markers:\n"
        "1: Describe the scene in the image.\n"
        "2: State the text recognized inside the box.\n"
        "3: Give the English translation that is consistent with the scene."
    ),
    "fr": (
        "Appuyez-vous sur l'image pour traduire le texte en {src_name} situé dans la boîte {box}.\n"
        "Répondez en trois étapes numérotées, en gardant les marqueurs:\n"
        "1: Décrivez la scène de l'image.\n"
        "2: Indiquez le texte reconnu dans la boîte.\n"
        "3: Donnez la traduction française cohérente avec la scène."
    ),
    "de": (
        "Nutzen Sie das Bild, um den {src_name} Text im Kasten {box} zu übersetzen.\n"
        "Antworten Sie in genau drei nummerierten Schritten mit denselben Markierungen:\n"
        "1: Beschreiben Sie die Szene im Bild.\n"
        "2: Nennen Sie den im Kasten erkannten Text.\n"
        "3: Geben Sie die zur Szene passende deutsche Übersetzung an."
    ),
}

_PLAIN_TEMPLATES = {
    "zh": "请将方框 {box} 内的{src_name}文字翻译成中文，只回答译文。",
    "en": "Translate the {src_name} text inside the box {box} into English. Answer with the translation only.",
    "fr": "Traduisez en français le texte en {src_name} situé dans la boîte {box}. Répondez uniquement par la traduction.",
    "de": "Übersetzen Sie den {src_name} Text im Kasten {box} ins Deutsche. Antworten Sie nur mit der Übersetzung.",
}


def _check_pair(src_lang: str, tgt_lang: str) -> None:
    if src_lang not in SUPPORTED_LANGS or tgt_lang not in SUPPORTED_LANGS:
        raise UnsupportedLanguageError(f"unsupported language pair {src_lang}-{tgt_lang}")


def _box_str(region: TextRegion) -> str:
    b = region.box
    return f"[{b.x}, {b.y}, {b.w}, {b.h}]"


def build_cot_prompt(src_lang: str, tgt_lang: str, region: TextRegion) -> str:
    """Three-step chain-of-thought prompt, written in the target language."""
    _check_pair(src_lang, tgt_lang)
    return _COT_TEMPLATES[tgt_lang].format(
        src_name=LANG_NAMES[src_lang][tgt_lang], box=_box_str(region)
    )


def build_plain_prompt(src_lang: str, tgt_lang: str, region: TextRegion) -> str:
    """Direct translation prompt without the scene-description step."""
    _check_pair(src_lang, tgt_lang)
    return _PLAIN_TEMPLATES[tgt_lang].format(
        src_name=LANG_NAMES[src_lang][tgt_lang], box=_box_str(region)
    )


_MARKER = re.compile(r"(?:(?<=\s)|^)(\d+)\s*:\s*")


def parse_cot_response(raw: str) -> tuple[list[str], str]:
    """Split a step-marked response into (intermediate steps, final translation).

    The final translation is everything after the last "N:" marker,
    whitespace-trimmed; markers themselves never appear in the output.
    """
    if not raw or not raw.strip():
        raise ResponseParseError("empty response", raw or "")
    matches = list(_MARKER.finditer(raw))
    if not matches:
        raise ResponseParseError("no step markers found", raw)
    segments = []
    for i, m in enumerate(matches):
        end = matches[i + 1].start() if i + 1 < len(matches) else len(raw)
        segments.append(raw[m.end() : end].strip())
    final = segments[-1]
    if not final:
        raise ResponseParseError("empty text after final step marker", raw)
    return segments[:-1], final
