"""Corpus evaluation reports and result-table rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .. import raster
from ..corpus.pairs import CorpusManifest
from .bleu import BleuResult, bleu
from .image import l1_distance, ssim
from .rubric import aggregate_rubric, load_rubric_csv


@dataclass
class EvalReport:
    rows: list[dict]                 # {pair_id, ssim, l1, ok, error}
    mean_ssim: float | None
    mean_l1: float | None
    bleu: BleuResult | None = None
    comet: float | None = None
    rubric: dict | None = None
    evaluated: int = 0
    failed: int = 0
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "rows": self.rows,
            "mean_ssim": self.mean_ssim,
            "mean_l1": self.mean_l1,
            "evaluated": self.evaluated,
            "failed": self.failed,
            "meta": self.meta,
            "comet": self.comet,
            "rubric": self.rubric,
        }
        if self.bleu is not None:
            d["bleu"] = {
                "score": self.bleu.score,
                "precisions": list(self.bleu.precisions),
                "brevity_penalty": self.bleu.brevity_penalty,
                "hyp_len": self.bleu.hyp_len,
                "ref_len": self.bleu.ref_len,
                "zero_precision": self.bleu.zero_precision,
            }
        else:
            d["bleu"] = None
        return d

    def save(self, path: Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, ensure_ascii=False, sort_keys=True),
            encoding="utf-8",
        )


def _load_hypotheses(outputs_dir: Path) -> dict[int, str]:
    """Per-pair hypothesis strings from a translate run's report.jsonl."""
    report = Path(outputs_dir) / "report.jsonl"
    if not report.is_file():
        return {}
    hyps: dict[int, str] = {}
    for line in report.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        if "pair_id" in rec:
            texts = [r.get("translation", "") for r in rec.get("regions", []) if r.get("translation")]
            if texts:
                hyps[int(rec["pair_id"])] = " ".join(texts)
    return hyps


def evaluate_corpus(
    outputs_dir: Path,
    manifest: CorpusManifest,
    comet_path: Path | None = None,
    rubric_path: Path | None = None,
) -> EvalReport:
    """Score translated images in outputs_dir against their references.

    Outputs are paired to references by pair_id (`<id>.png`). Missing or
    unreadable outputs become failure rows, excluded from the means but
    counted. BLEU is computed when the outputs directory carries a
    translation report with per-region hypotheses.
    """
    outputs_dir = Path(outputs_dir)
    rows: list[dict] = []
    ssims: list[float] = []
    l1s: list[float] = []
    hyp_map = _load_hypotheses(outputs_dir)
    hyp_lines: list[str] = []
    ref_lines: list[str] = []
    for entry in manifest.entries:
        ref = raster.load_png(manifest.root / entry.paths["T"])
        out_path = outputs_dir / f"{entry.pair_id}.png"
        row: dict = {"pair_id": entry.pair_id}
        try:
            if not out_path.is_file():
                raise FileNotFoundError(f"missing output {out_path.name}")
            out = raster.load_png(out_path)
            row["ssim"] = ssim(out, ref)
            row["l1"] = l1_distance(out, ref)
            row["ok"] = True
            ssims.append(row["ssim"])
            l1s.append(row["l1"])
        except (FileNotFoundError, ValueError, OSError) as err:
            row.update(ok=False, error=str(err))
        rows.append(row)
        if entry.pair_id in hyp_map:
            hyp_lines.append(hyp_map[entry.pair_id])
            ref_lines.append(entry.tgt_text)

    comet = None
    if comet_path is not None and Path(comet_path).is_file():
        comet = float(json.loads(Path(comet_path).read_text(encoding="utf-8")).get("comet"))
    rubric = None
    if rubric_path is not None and Path(rubric_path).is_file():
        rubric = aggregate_rubric(load_rubric_csv(rubric_path))

    return EvalReport(
        rows=rows,
        mean_ssim=sum(ssims) / len(ssims) if ssims else None,
        mean_l1=sum(l1s) / len(l1s) if l1s else None,
        bleu=bleu(hyp_lines, ref_lines) if hyp_lines else None,
        comet=comet,
        rubric=rubric,
        evaluated=len(ssims),
        failed=len(rows) - len(ssims),
        meta={
            "outputs_dir": str(outputs_dir),
            "corpus": f"{manifest.src_lang}-{manifest.tgt_lang}",
            "count": manifest.count,
        },
    )


def format_results_table(
    values: dict[str, dict[str, dict[str, float | None]]],
    methods: list[str],
    metrics: tuple[str, ...] = ("SSIM", "L1"),
) -> str:
    """Fixed-layout results table: one row per metric and direction,
    one column per method. Missing values render as "-".

    `values` maps metric -> direction -> method -> value.
    """
    col_w = max(12, max((len(m) for m in methods), default=0) + 2)
    header = f"{'Metric':<8}{'Direction':<11}" + "".join(f"{m:>{col_w}}" for m in methods)
    lines = [header, "-" * len(header)]
    for metric in metrics:
        directions = values.get(metric, {})
        for direction in directions:
            cells = []
            for method in methods:
                v = directions[direction].get(method)
                cells.append(f"{v:.3f}" if v is not None else "-")
            lines.append(
                f"{metric:<8}{direction:<11}" + "".join(f"{c:>{col_w}}" for c in cells)
            )
    return "\n".join(lines)
