"""Evaluation report: precision/recall tables per decoding mode."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .metrics import TARGETS, LabelMetrics

_COLUMNS = [l.value for l in TARGETS] + ["overall"]


def _fmt(v: Optional[float]) -> str:
    return "-" if v is None else f"{v:.3f}"


def _mean(values) -> Optional[float]:
    vals = [v for v in values if v is not None]
    return float(np.mean(vals)) if vals else None


@dataclass
class EvalReport:
    protocol: str
    metrics: Dict[str, LabelMetrics]
    fold_metrics: Dict[str, List[LabelMetrics]] = field(default_factory=dict)
    folds: List[List[str]] = field(default_factory=list)
    significance: Dict[str, dict] = field(default_factory=dict)
    intervals: Dict[str, dict] = field(default_factory=dict)
    per_fold_average: bool = False
    config: dict = field(default_factory=dict)

    @property
    def modes(self) -> List[str]:
        return list(self.metrics)

    def _stat(self, mode: str, label: str, which: str) -> Optional[float]:
        def one(m: LabelMetrics):
            if label == "overall":
                return m.pooled_precision() if which == "precision" else m.pooled_recall()
            return m.precision(label) if which == "precision" else m.recall(label)

        if self.per_fold_average and self.fold_metrics.get(mode):
            return _mean(one(m) for m in self.fold_metrics[mode])
        return one(self.metrics[mode])

    def precision(self, mode: str, label: str) -> Optional[float]:
        return self._stat(mode, label, "precision")

    def recall(self, mode: str, label: str) -> Optional[float]:
        return self._stat(mode, label, "recall")

    def pooled_precision(self, mode: str, labels) -> Optional[float]:
        return self.metrics[mode].pooled_precision(labels)

    def render_text(self) -> str:
        """Aligned text tables: precision, then recall, one row per mode."""
        lines = []
        for which in ("precision", "recall"):
            lines.append(f"{which.capitalize()} ({self.protocol})")
            lines.append(f"{'':6}{'model':9}" + "".join(f"{c:>9}" for c in _COLUMNS))
            for i, mode in enumerate(self.modes):
                tag = self.protocol if i == 0 else ""
                row = "".join(f"{_fmt(self._stat(mode, c, which)):>9}" for c in _COLUMNS)
                lines.append(f"{tag:6}{mode:9}{row}")
            lines.append("")
        if self.intervals:
            lines.append(f"{int(round(100 * self.config.get('ci_level', 0.95)))}% intervals (precision)")
            for mode, ivs in self.intervals.items():
                cells = []
                for c in _COLUMNS:
                    iv = ivs.get(c)
                    cells.append("-" if iv is None else f"{iv[0]:.2f}-{iv[1]:.2f}")
                lines.append(f"{mode:9}" + "  ".join(cells))
            lines.append("")
        for key, r in self.significance.items():
            p = "-" if r["p_value"] is None else f"{r['p_value']:.4g}"
            lines.append(f"signed-rank {key}: n={r['n']} p={p} ({r['method']})")
        return "\n".join(lines).rstrip() + "\n"

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "per_fold_average": self.per_fold_average,
            "config": self.config,
            "folds": self.folds,
            "metrics": {m: v.to_dict() for m, v in self.metrics.items()},
            "summary": {
                m: {c: {"precision": self.precision(m, c), "recall": self.recall(m, c)} for c in _COLUMNS}
                for m in self.modes
            },
            "fold_metrics": {m: [x.to_dict() for x in v] for m, v in self.fold_metrics.items()},
            "significance": self.significance,
            "intervals": {m: {k: list(v) if v else None for k, v in ivs.items()}
                          for m, ivs in self.intervals.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)
