"""Paired signed-rank test and percentile bootstrap intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm, rankdata

EXACT_MAX_N = 12
MIN_PAIRS = 5


class TooFewPairs(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # sum of ranks of positive differences a - b
    p_value: float
    n: int  # pairs left after dropping zero differences
    method: str  # "exact" or "normal"
    alternative: str


def _exact_upper_tail(doubled: np.ndarray) -> np.ndarray:
    """Distribution of the doubled positive-rank sum under random signs.

    ``doubled`` are integer twice-midranks. Returns counts indexed by the
    doubled statistic.
    """
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in doubled.tolist():
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:total + 1 - r]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(a: Sequence[float], b: Sequence[float],
                         alternative: str = "two-sided") -> WilcoxonResult:
    """Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped and tied absolute differences get midranks.
    The p-value is exact (all sign patterns) for up to 12 pairs and a
    tie-corrected normal approximation with continuity correction above.

    Parameters
    ----------
    a, b : paired samples of equal length
    alternative : {"two-sided", "greater", "less"}
        ``greater`` tests whether ``a`` tends to exceed ``b``.
    """
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("a and b must be 1-d sequences of equal length")
    d = a - b
    d = d[d != 0]
    n = len(d)
    if n < MIN_PAIRS:
        raise TooFewPairs(f"{n} non-zero differences; at least {MIN_PAIRS} needed")
    ranks = rankdata(np.abs(d))
    w = float(ranks[d > 0].sum())
    if n <= EXACT_MAX_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        counts = _exact_upper_tail(doubled)
        denom = 2 ** n
        k = int(round(2 * w))
        upper = float(sum(counts[k:]) / denom)
        lower = float(sum(counts[:k + 1]) / denom)
        method = "exact"
    else:
        mean = n * (n + 1) / 4.0
        _, t = np.unique(ranks, return_counts=True)
        var = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(t ** 3 - t)) / 48.0
        sd = math.sqrt(var)
        upper = float(norm.sf((w - mean - 0.5) / sd))
        lower = float(norm.cdf((w - mean + 0.5) / sd))
        method = "normal"
    if alternative == "greater":
        p = upper
    elif alternative == "less":
        p = lower
    else:
        p = min(1.0, 2.0 * min(upper, lower))
    return WilcoxonResult(w, p, n, method, alternative)


def bootstrap_ci(values: Sequence[float], level: float = 0.95, resamples: int = 1000,
                 seed: int = 0, denominators: Optional[Sequence[float]] = None
                 ) -> Tuple[float, float]:
    """Percentile bootstrap interval over units (abstracts).

    Without ``denominators`` the statistic is the mean of ``values``; with
    them it is the ratio ``sum(values) / sum(denominators)`` (e.g. true
    positives over predicted positives). Resamples whose denominator is zero
    are skipped.
    """
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    if resamples < 1000:
        raise ValueError("at least 1000 resamples are required")
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise EmptyInput("no values to resample")
    den = np.ones_like(v) if denominators is None else np.asarray(denominators, dtype=np.float64)
    if den.shape != v.shape:
        raise ValueError("values and denominators differ in length")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, v.size, size=(resamples, v.size))
    num_s = v[idx].sum(axis=1)
    den_s = den[idx].sum(axis=1)
    ok = den_s > 0
    if not ok.any():
        raise EmptyInput("every resample has a zero denominator")
    stats = num_s[ok] / den_s[ok]
    alpha = (1 - level) / 2
    lo, hi = np.quantile(stats, [alpha, 1 - alpha])
    return float(lo), float(hi)
