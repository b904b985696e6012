"""Evaluation metrics: SSIM, L1, BLEU, rubric aggregation, reports."""

from .bleu import BleuResult, bleu, tokenize
from .image import gaussian_window, l1_distance, ssim
from .report import EvalReport, evaluate_corpus, format_results_table
from .rubric import AXES, RubricScore, aggregate_rubric, load_rubric_csv

__all__ = [
    "AXES",
    "BleuResult",
    "EvalReport",
    "RubricScore",
    "aggregate_rubric",
    "bleu",
    "evaluate_corpus",
    "format_results_table",
    "gaussian_window",
    "l1_distance",
    "load_rubric_csv",
    "ssim",
    "tokenize",
]
