"""Human/LLM judgment rubric: three axes, three points each.

Axes: translation accuracy, font style consistency, background
coherence; every score is 1, 2, or 3 (higher is better). Rows are
ingested from CSV with columns image_id, rater_id, and one per axis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

AXES = ("translation_accuracy", "font_style_consistency", "background_coherence")
VALID_POINTS = (1, 2, 3)


@dataclass(frozen=True)
class RubricScore:
    image_id: str
    rater_id: str
    translation_accuracy: int
    font_style_consistency: int
    background_coherence: int

    def __post_init__(self):
        for axis in AXES:
            v = getattr(self, axis)
            if v not in VALID_POINTS:
                raise ValueError(f"{axis}={v!r} not in {VALID_POINTS}")


def aggregate_rubric(scores: list[RubricScore]) -> dict:
    """Per-axis mean and point histogram over a non-empty score list."""
    if not scores:
        raise ValueError("no rubric scores to aggregate")
    out = {}
    for axis in AXES:
        values = [getattr(s, axis) for s in scores]
        out[axis] = {
            "mean": sum(values) / len(values),
            "histogram": {p: values.count(p) for p in VALID_POINTS},
        }
    out["count"] = len(scores)
    return out


def load_rubric_csv(path: Path) -> list[RubricScore]:
    """Parse rubric rows, rejecting out-of-range points at read time."""
    scores = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.DictReader(fh)):
            try:
                scores.append(
                    RubricScore(
                        image_id=row["image_id"],
                        rater_id=row["rater_id"],
                        **{axis: int(row[axis]) for axis in AXES},
                    )
                )
            except (KeyError, ValueError) as err:
                raise ValueError(f"{path}:{i + 2}: bad rubric row: {err}") from err
    return scores
