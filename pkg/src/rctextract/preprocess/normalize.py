"""Replacement of numeric constructions by normalization tags.

Tokens are joined by single spaces and a prioritized table of regular
expressions is applied as a rewriting system: whenever a pattern fires,
scanning restarts from the top of the table, until no pattern applies. This
lets a unit found at the end of a list propagate to the bare numbers before
it ("10, 20 and 30 mmHg" -> three ``_MEAS_``).
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from ..text import tokenize


class NormTag(str, enum.Enum):
    NUM = "_NUM_"
    PERC = "_PERC_"
    MEAS = "_MEAS_"
    CONFINT = "_CONFINT_"
    CONFINTM = "_CONFINTM_"
    RANGE = "_RANGE_"
    RATIO = "_RATIO_"
    PVAL = "_PVAL_"
    FRAC = "_FRAC_"
    POFT = "_POFT_"
    GONE = "_GONE_"
    DOSE = "_DOSE_"
    COUNT = "_COUNT_"
    PERCRANGE = "_PERCRANGE_"
    MEASRANGE = "_MEASRANGE_"
    DATE = "_DATE_"

    def __str__(self) -> str:
        return self.value

    @property
    def type_id(self) -> int:
        return _TYPE_IDS[self]


_TYPE_GROUPS = [
    (NormTag.NUM, NormTag.MEAS, NormTag.COUNT, NormTag.DOSE),
    (NormTag.PERC, NormTag.PERCRANGE),
    (NormTag.CONFINT, NormTag.CONFINTM),
    (NormTag.RANGE, NormTag.MEASRANGE),
    (NormTag.RATIO,),
    (NormTag.PVAL,),
    (NormTag.FRAC,),
    (NormTag.POFT,),
    (NormTag.GONE,),
    (NormTag.DATE,),
]
_TYPE_IDS = {tag: i for i, group in enumerate(_TYPE_GROUPS) for tag in group}

#: Type value for words that are not normalization tags.
NON_TAG_TYPE = 101

_TAG_BY_VALUE = {t.value: t for t in NormTag}


def as_tag(word: str) -> Optional[NormTag]:
    return _TAG_BY_VALUE.get(word)


def norm_type(word: str) -> int:
    """Type id of a normalized word: 0..15 for tags, 101 otherwise."""
    tag = _TAG_BY_VALUE.get(word)
    return NON_TAG_TYPE if tag is None else tag.type_id


# --------------------------------------------------------------------------
# pattern table

NUM = r"(?:[-−+]?(?:\d[\d,]*(?:\.\d+)?|\.\d+))"
PM = r"(?:\+/-|±)"
NUMPM = rf"(?:{NUM}(?: {PM} {NUM})?)"
DASH = r"(?:-|–|—)"
MEAS_UNIT = (
    r"(?:mm Hg|mmHg|mm|cm|µm|μm|um|nm|ml|mL|dB|microns?|microm|diopters?|letters|"
    r"cells / mm2|cells / mm²|cells/mm2|logMAR)"
)
DOSE_UNIT = r"(?:(?:mg|µg|μg|mcg|g|IU|units)(?: / (?:kg|day|d|ml|mL))?)"
TIME_UNIT = r"(?:hours?|hrs?|h|days?|weeks?|wks?|months?|mos?|years?|yrs?|minutes?|mins?)"
MONTH = (
    r"(?:January|February|March|April|May|June|July|August|September|October|November|December|"
    r"Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec)"
)
CONNECT = r"(?:,|and|or|to|vs|versus|, and|, or|vs .)"
COUNT_NOUN = r"(?:patients|eyes|subjects|participants|women|men|individuals|volunteers|children|cases)"


def _tok(p: str) -> str:
    # anchor a pattern on token boundaries of the space-joined sentence
    return rf"(?<!\S){p}(?!\S)"


def _ellipsis(tag: NormTag) -> Tuple[re.Pattern, NormTag]:
    return re.compile(rf"(?<!\S){NUMPM}(?= {CONNECT}(?: and| or)? {tag.value}(?!\S))"), tag


_CI_HEAD = r"(?:(?:\( |\[ )?(?:95|90|99) % )?(?:CI|CIs|confidence intervals?)(?: ,| :| =)?"
_CI_BODY = rf"(?:\( |\[ )?{NUM} (?:to|{DASH}|,) {NUM}"

PATTERNS: List[Tuple[re.Pattern, NormTag]] = [
    (re.compile(_tok(rf"{_CI_HEAD} {_CI_BODY} {MEAS_UNIT}(?: \)| \])*")), NormTag.CONFINTM),
    (re.compile(_tok(rf"{_CI_HEAD} {_CI_BODY}(?: \)| \])*")), NormTag.CONFINT),
    (re.compile(_tok(rf"[Pp](?: values?)? (?:<|>|=|≤|≥|<=|>=|< =|> =) {NUM}")), NormTag.PVAL),
    (re.compile(_tok(rf"{MONTH} (?:{NUM} )?(?:, )?(?:19|20)\d\d")), NormTag.DATE),
    (re.compile(_tok(rf"{NUM}(?: %)? {DASH} {NUM} %")), NormTag.PERCRANGE),
    (re.compile(_tok(rf"{NUM} {DASH} {NUM} {MEAS_UNIT}")), NormTag.MEASRANGE),
    (re.compile(_tok(rf"{NUM}(?: (?:{DASH}|to) {NUM})?(?: {DASH})? {TIME_UNIT}")), NormTag.POFT),
    (re.compile(_tok(rf"{NUMPM} {DOSE_UNIT}")), NormTag.DOSE),
    (re.compile(_tok(rf"{NUMPM} {MEAS_UNIT}(?: {PM} {NUM} {MEAS_UNIT})?")), NormTag.MEAS),
    (re.compile(_tok(rf"{NUMPM} %(?: {PM} {NUM} %)?")), NormTag.PERC),
    (re.compile(_tok(rf"(?:[Gg]roups?|[Aa]rms?) (?:{NUM}|[A-D]|I{{1,3}}|one|two)")), NormTag.GONE),
    (re.compile(_tok(rf"{NUM} of (?:the )?{NUM}")), NormTag.FRAC),
    (re.compile(_tok(rf"{NUM} / {NUM}")), NormTag.RATIO),
    (re.compile(_tok(rf"{NUM} {DASH} {NUM}")), NormTag.RANGE),
    _ellipsis(NormTag.MEAS),
    _ellipsis(NormTag.PERC),
    _ellipsis(NormTag.DOSE),
    _ellipsis(NormTag.POFT),
    (re.compile(_tok(rf"{NUM}(?= {COUNT_NOUN}(?!\S))")), NormTag.COUNT),
    (re.compile(_tok(NUM)), NormTag.NUM),
]

_HYPHENS = frozenset({"-", "–", "—", "−"})


@dataclass(frozen=True)
class NormToken:
    """A token of a normalized sentence; ``start``/``end`` index the original text."""

    text: str
    start: int
    end: int
    tag: Optional[NormTag] = None


def _rewrite_once(toks: List[NormToken]) -> bool:
    joined = " ".join(t.text for t in toks)
    starts, ends, pos = {}, {}, 0
    for i, t in enumerate(toks):
        starts[pos] = i
        ends[pos + len(t.text)] = i
        pos += len(t.text) + 1
    for regex, tag in PATTERNS:
        hits = []
        for m in regex.finditer(joined):
            i, j = starts.get(m.start()), ends.get(m.end())
            if i is None or j is None or m.end() == m.start():
                continue
            hits.append((i, j))
        if not hits:
            continue
        for i, j in reversed(hits):
            toks[i:j + 1] = [NormToken(tag.value, toks[i].start, toks[j].end, tag)]
        return True
    return False


def normalize_tokens(toks: Sequence[NormToken]) -> List[NormToken]:
    """Apply the pattern table to a fixpoint and drop stand-alone hyphens."""
    out = [t for t in toks]
    while _rewrite_once(out):
        pass
    return [t for t in out if t.text not in _HYPHENS]


def normalize_sentence(sentence: str, offset: int = 0) -> List[NormToken]:
    """Tokenize and normalize one sentence, keeping original character spans."""
    toks = []
    for surface, s, e in tokenize(sentence, offset):
        toks.append(NormToken(surface, s, e, as_tag(surface)))
    return normalize_tokens(toks)


def normalize_text(sentence: str) -> str:
    """String form of :func:`normalize_sentence`.

    >>> normalize_text("10, 20 and 30 mmHg")
    '_MEAS_ , _MEAS_ and _MEAS_'
    """
    return " ".join(t.text for t in normalize_sentence(sentence))


def denormalize(tokens: Sequence[NormToken], original: str, offset: int = 0) -> List[str]:
    """Original surface text of every normalized token."""
    return [original[t.start - offset:t.end - offset] for t in tokens]
