"""Scoring, evaluation protocols, significance testing and synthetic data."""
from .metrics import Counts, LabelMetrics, LengthMismatch, score, total
from .protocol import CorpusTooSmall, evaluate_abstracts, fold_assignment, holdout, kfold
from .report import EvalReport
from .stats import EmptyInput, TooFewPairs, WilcoxonResult, bootstrap_ci, wilcoxon_signed_rank
from .synthetic import NOISE_PRESETS, NoiseConfig, generate_synthetic, synthetic_texts

__all__ = [
    "CorpusTooSmall", "Counts", "EmptyInput", "EvalReport", "LabelMetrics", "LengthMismatch",
    "NOISE_PRESETS", "NoiseConfig", "TooFewPairs", "WilcoxonResult", "bootstrap_ci",
    "evaluate_abstracts", "fold_assignment", "generate_synthetic", "holdout", "kfold", "score",
    "synthetic_texts", "total", "wilcoxon_signed_rank",
]
