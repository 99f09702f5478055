"""Per-label true-positive / predicted / annotated counts."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

from ..corpus import LABELS, Label

TARGETS = LABELS[:6]


class LengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Counts:
    tp: int = 0
    cp: int = 0
    ap: int = 0

    def __add__(self, other: "Counts") -> "Counts":
        return Counts(self.tp + other.tp, self.cp + other.cp, self.ap + other.ap)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


@dataclass(frozen=True)
class LabelMetrics:
    """Counts for the six non-null labels.

    ``tp`` are tokens labeled ``l`` by both system and annotator, ``cp``
    tokens labeled ``l`` by the system and ``ap`` tokens annotated ``l``.
    Precision and recall are None where their denominator is zero.
    """

    counts: Dict[Label, Counts] = field(default_factory=lambda: {l: Counts() for l in TARGETS})

    def __add__(self, other: "LabelMetrics") -> "LabelMetrics":
        return LabelMetrics({l: self.counts[l] + other.counts[l] for l in TARGETS})

    def precision(self, label) -> Optional[float]:
        c = self.counts[Label(label)]
        return _ratio(c.tp, c.cp)

    def recall(self, label) -> Optional[float]:
        c = self.counts[Label(label)]
        return _ratio(c.tp, c.ap)

    def pooled(self, labels: Iterable = TARGETS) -> Counts:
        out = Counts()
        for l in labels:
            out = out + self.counts[Label(l)]
        return out

    def pooled_precision(self, labels: Iterable = TARGETS) -> Optional[float]:
        """Micro-averaged precision: total TP over total CP across ``labels``."""
        c = self.pooled(labels)
        return _ratio(c.tp, c.cp)

    def pooled_recall(self, labels: Iterable = TARGETS) -> Optional[float]:
        c = self.pooled(labels)
        return _ratio(c.tp, c.ap)

    @property
    def overall_precision(self) -> Optional[float]:
        return self.pooled_precision(TARGETS)

    def to_dict(self) -> dict:
        return {
            l.value: {
                "tp": self.counts[l].tp, "cp": self.counts[l].cp, "ap": self.counts[l].ap,
                "precision": self.precision(l), "recall": self.recall(l),
            }
            for l in TARGETS
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LabelMetrics":
        return cls({l: Counts(d[l.value]["tp"], d[l.value]["cp"], d[l.value]["ap"]) for l in TARGETS})


def score(predicted: Sequence, gold: Sequence) -> LabelMetrics:
    """Count agreement between aligned predicted and gold label sequences."""
    if len(predicted) != len(gold):
        raise LengthMismatch(f"{len(predicted)} predictions for {len(gold)} gold labels")
    tp = {l: 0 for l in TARGETS}
    cp = dict(tp)
    ap = dict(tp)
    for p, g in zip(predicted, gold):
        p, g = Label(p), Label(g)
        if p is not Label.O:
            cp[p] += 1
            if p is g:
                tp[p] += 1
        if g is not Label.O:
            ap[g] += 1
    return LabelMetrics({l: Counts(tp[l], cp[l], ap[l]) for l in TARGETS})


def total(metrics: Iterable[LabelMetrics]) -> LabelMetrics:
    out = LabelMetrics()
    for m in metrics:
        out = out + m
    return out
