"""Corpus-level BLEU-4 with clipped n-gram precisions and brevity penalty.

No smoothing: counts are pooled over the corpus and a zero precision at
any order yields a score of exactly 0 (flagged in the result). Latin
text tokenizes on whitespace; lines containing CJK tokenize per
character so that segmentation never depends on an external tool.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

MAX_ORDER = 4


def _has_cjk(line: str) -> bool:
    return any(
        0x2E80 <= ord(c) <= 0x9FFF or 0x3400 <= ord(c) <= 0x4DBF or 0xF900 <= ord(c) <= 0xFAFF
        for c in line
    )


def tokenize(line: str) -> list[str]:
    """Whitespace tokens; per-character for lines containing CJK."""
    if _has_cjk(line):
        return [c for c in line if not c.isspace()]
    return line.split()


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class BleuResult:
    score: float                      # [0, 100]
    precisions: tuple[float, ...]     # modified n-gram precisions, n = 1..4
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    zero_precision: bool

    def __str__(self):
        ps = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        return f"BLEU = {self.score:.2f} ({ps}, BP = {self.brevity_penalty:.3f})"


def bleu(hypotheses: list[str], references: list[str], tokenizer=tokenize) -> BleuResult:
    """Corpus BLEU over parallel lists of hypothesis and reference lines."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference count mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if not hypotheses:
        raise ValueError("empty corpus")
    matched = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        h = tokenizer(hyp)
        r = tokenizer(ref)
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, MAX_ORDER + 1):
            hc = _ngrams(h, n)
            rc = _ngrams(r, n)
            matched[n - 1] += sum(min(c, rc[g]) for g, c in hc.items())
            total[n - 1] += max(0, len(h) - n + 1)
    precisions = tuple(m / t if t > 0 else 0.0 for m, t in zip(matched, total))
    if hyp_len == 0:
        return BleuResult(0.0, precisions, 0.0, 0, ref_len, True)
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    if any(p == 0.0 for p in precisions):
        return BleuResult(0.0, precisions, bp, hyp_len, ref_len, True)
    log_avg = sum(math.log(p) for p in precisions) / MAX_ORDER
    return BleuResult(
        100.0 * bp * math.exp(log_avg), precisions, bp, hyp_len, ref_len, False
    )
