"""Cross-validation and hold-out evaluation of the three decoding modes."""
from __future__ import annotations

import itertools
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..corpus import Abstract
from ..extractor import EvidenceExtractor, token_labels
from ..inference import MODES
from .metrics import TARGETS, LabelMetrics, score, total
from .report import EvalReport
from .stats import TooFewPairs, bootstrap_ci, wilcoxon_signed_rank

log = logging.getLogger(__name__)


class CorpusTooSmall(ValueError):
    pass


def fold_assignment(n: int, k: int, seed: int) -> List[np.ndarray]:
    """Seeded shuffle split into ``k`` contiguous folds (sizes differ by at most one)."""
    if k < 2:
        raise CorpusTooSmall(f"k must be at least 2, got {k}")
    if n < k:
        raise CorpusTooSmall(f"{n} abstracts cannot fill {k} folds")
    order = np.random.default_rng(seed).permutation(n)
    return [np.sort(f) for f in np.array_split(order, k)]


def evaluate_abstracts(estimator: EvidenceExtractor, abstracts: Sequence[Abstract],
                       modes: Sequence[str] = MODES) -> Dict[str, List[LabelMetrics]]:
    """Per-abstract metrics of a fitted extractor for each mode."""
    out: Dict[str, List[LabelMetrics]] = {m: [] for m in modes}
    for a in abstracts:
        for m in modes:
            doc, cands, sol = estimator.decode(a, m)
            out[m].append(score(token_labels(doc, cands, sol), doc.labels))
    return out


def _run_fold(args) -> Dict[str, List[LabelMetrics]]:
    train, test, config, modes = args
    est = EvidenceExtractor(**(config or {})).fit(train)
    return evaluate_abstracts(est, test, modes)


def _significance(fold_metrics: Dict[str, List[LabelMetrics]]) -> Dict[str, dict]:
    """Paired signed-rank tests of per-fold overall precision between modes."""
    out = {}
    for a, b in itertools.combinations(list(fold_metrics), 2):
        pairs = [(x.overall_precision, y.overall_precision)
                 for x, y in zip(fold_metrics[a], fold_metrics[b])]
        pairs = [(x, y) for x, y in pairs if x is not None and y is not None]
        key = f"{a}-{b}"
        try:
            r = wilcoxon_signed_rank([x for x, _ in pairs], [y for _, y in pairs])
            out[key] = {"statistic": r.statistic, "p_value": r.p_value, "n": r.n, "method": r.method}
        except TooFewPairs as e:
            out[key] = {"statistic": None, "p_value": None, "n": len(pairs), "method": str(e)}
    return out


def _intervals(per_abstract: Dict[str, List[LabelMetrics]], level: float, resamples: int,
               seed: int) -> Dict[str, Dict[str, Optional[Tuple[float, float]]]]:
    """Bootstrap intervals of precision (TP over CP, resampling abstracts)."""
    out: Dict[str, Dict[str, Optional[Tuple[float, float]]]] = {}
    for mode, items in per_abstract.items():
        out[mode] = {}
        for key in [l.value for l in TARGETS] + ["overall"]:
            labels = TARGETS if key == "overall" else [key]
            tp = [m.pooled(labels).tp for m in items]
            cp = [m.pooled(labels).cp for m in items]
            out[mode][key] = bootstrap_ci(tp, level, resamples, seed, denominators=cp) if sum(cp) else None
    return out


def kfold(corpus: Sequence[Abstract], k: int = 10, seed: int = 0, config: Optional[dict] = None,
          modes: Sequence[str] = MODES, per_fold_average: bool = False, n_jobs: int = 1,
          ci_level: float = 0.95, ci_resamples: int = 1000) -> EvalReport:
    """``k``-fold cross-validation; a fresh extractor (and feature dictionary) per fold.

    Counts are pooled over folds before computing metrics. With
    ``per_fold_average`` the report's precision and recall are instead the
    mean of the per-fold values.
    """
    corpus = list(corpus)
    folds = fold_assignment(len(corpus), k, seed)
    jobs = []
    for f in folds:
        held = set(f.tolist())
        train = [a for i, a in enumerate(corpus) if i not in held]
        jobs.append((train, [corpus[i] for i in f], config, tuple(modes)))
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(_run_fold, jobs))
    else:
        results = [_run_fold(j) for j in jobs]
    fold_metrics = {m: [total(r[m]) for r in results] for m in modes}
    per_abstract = {m: [x for r in results for x in r[m]] for m in modes}
    return EvalReport(
        protocol=f"CV{k}",
        metrics={m: total(fold_metrics[m]) for m in modes},
        fold_metrics=fold_metrics,
        folds=[[corpus[i].id for i in f] for f in folds],
        significance=_significance(fold_metrics),
        intervals=_intervals(per_abstract, ci_level, ci_resamples, seed),
        per_fold_average=per_fold_average,
        config=dict(config or {}, k=k, seed=seed, ci_level=ci_level),
    )


def holdout(train: Sequence[Abstract], test: Sequence[Abstract], config: Optional[dict] = None,
            modes: Sequence[str] = MODES, seed: int = 0, ci_level: float = 0.95,
            ci_resamples: int = 1000) -> EvalReport:
    """Train on ``train``, evaluate on ``test``."""
    if not train or not test:
        raise CorpusTooSmall("hold-out needs non-empty training and test sets")
    per_abstract = _run_fold((list(train), list(test), config, tuple(modes)))
    return EvalReport(
        protocol="HO",
        metrics={m: total(per_abstract[m]) for m in modes},
        fold_metrics={},
        folds=[[a.id for a in test]],
        significance={},
        intervals=_intervals(per_abstract, ci_level, ci_resamples, seed),
        per_fold_average=False,
        config=dict(config or {}, seed=seed, ci_level=ci_level),
    )
