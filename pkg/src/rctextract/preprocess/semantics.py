"""Chunk semantic classes: rule patterns first, then a gazetteer search."""
from __future__ import annotations

import enum
import re
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence


class SemanticClass(str, enum.Enum):
    ARM = "ARM"
    CLINICAL_TRIAL = "CLINICAL-TRIAL"
    DIAGNOSTIC_TEST = "DIAGNOSTIC-TEST"
    DISEASE = "DISEASE-OR-MEDICAL-CONDITION"
    FREQUENCY = "FREQUENCY"
    TREATMENT = "MEDICAL-TREATMENT"
    OUTCOME_MEASURE = "OUTCOME-MEASURE"
    PATIENTS = "PATIENTS"
    PERIOD_OF_TIME = "PERIOD-OF-TIME"
    NONE = "none"

    def __str__(self) -> str:
        return self.value


# demoted to "none" inside any chunk
STOPWORDS = frozenset(
    """
    and or for not nor but
    the a an this that these those each every all no some any both either neither
    of in on at by with from as into onto than between among after before during
    within without under over through versus vs against per via to
    """.split()
)

_ARM_END = {"group", "groups", "arm", "arms"}
_PATIENT_END = {
    "patients", "patient", "subjects", "women", "men", "participants", "volunteers",
    "individuals", "children", "adults",
}
_TIME_UNITS = {
    "hour", "hours", "day", "days", "week", "weeks", "month", "months", "year", "years",
    "minute", "minutes",
}
_FREQUENCY_RE = re.compile(
    r"\b(once|twice|thrice|(?:one|two|three|four|_NUM_) times)\b.*\b(daily|day|weekly|week|nightly)\b"
    r"|\b(daily|nightly|bid|tid|qid|qd|qhs)\b"
    r"|\bevery (?:_NUM_ )?(?:hours?|days?|morning|evening|night)\b"
)


def _key(words: Sequence[str]) -> str:
    return " ".join(w.lower().replace("-", " ") for w in words).strip()


class Gazetteer:
    """Phrase -> semantic class lookup with whitespace-normalized lowercase keys."""

    def __init__(self, entries: Optional[Mapping[str, SemanticClass]] = None):
        self._entries: Dict[str, SemanticClass] = {}
        for phrase, cls in (entries or {}).items():
            self.add(phrase, cls)

    def add(self, phrase: str, cls) -> None:
        self._entries[" ".join(_key(phrase.split()).split())] = SemanticClass(cls)

    def get(self, phrase: str) -> Optional[SemanticClass]:
        return self._entries.get(" ".join(_key(phrase.split()).split()))

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, phrase: str) -> bool:
        return self.get(phrase) is not None

    @classmethod
    def load(cls, path=None) -> "Gazetteer":
        """Read ``phrase<TAB>CLASS`` lines; the packaged file when ``path`` is None."""
        if path is None:
            raw = resources.files("rctextract.preprocess").joinpath("data/gazetteer.tsv").read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                raw = fh.read()
        g = cls()
        for n, line in enumerate(raw.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path or 'gazetteer.tsv'}:{n}: expected 2 tab-separated fields")
            g.add(parts[0], parts[1].strip())
        return g


def rule_class(words: Sequence[str]) -> Optional[SemanticClass]:
    lower = [w.lower() for w in words]
    if "_GONE_" in words or lower[-1] in _ARM_END:
        return SemanticClass.ARM
    if lower[-1] in _PATIENT_END:
        return SemanticClass.PATIENTS
    if "_POFT_" in words or any(
        a == "_NUM_" and b in _TIME_UNITS for a, b in zip(words, lower[1:])
    ):
        return SemanticClass.PERIOD_OF_TIME
    if _FREQUENCY_RE.search(" ".join(w if w.startswith("_") else w.lower() for w in words)):
        return SemanticClass.FREQUENCY
    return None


def classify_chunk(words: Sequence[str], gazetteer: Gazetteer) -> SemanticClass:
    """Semantic class of a chunk.

    Rule patterns take priority. Otherwise the gazetteer is searched for the
    whole chunk, then with the leftmost word removed, repeatedly, down to the
    rightmost word alone.
    """
    if not words:
        raise ValueError("empty chunk")
    cls = rule_class(words)
    if cls is not None:
        return cls
    for i in range(len(words)):
        hit = gazetteer.get(" ".join(words[i:]))
        if hit is not None:
            return hit
    return SemanticClass.NONE


def propagate_semantics(cls: SemanticClass, words: Sequence[str]) -> List[SemanticClass]:
    """Per-token classes for a classified chunk; stopwords get ``none``."""
    return [SemanticClass.NONE if w.lower() in STOPWORDS else SemanticClass(cls) for w in words]
