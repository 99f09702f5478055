"""Low-level text utilities: span-preserving tokenizer and sentence splitter."""
from __future__ import annotations

import re
from typing import List, Tuple

Span = Tuple[int, int]

_TOKEN_RE = re.compile(
    r"""
    _[A-Z]+_                                   # normalization tag already present
    | \+/-|±                                   # plus-minus
    | (?<![\w)\].])[-−+]?\d+(?:,\d{3})*(?:\.\d+)?   # signed number
    | \d+(?:,\d{3})*(?:\.\d+)?                 # unsigned number
    | (?<![\w)\]])[-−]?\.\d+                   # leading-dot decimal (p < .05)
    | [<>]=|[≤≥]                               # comparison operators
    | [^\W\d_][\w']*(?<!')                     # word
    | [^\w\s]                                  # any single punctuation mark
    """,
    re.VERBOSE,
)


def tokenize(text: str, offset: int = 0) -> List[Tuple[str, int, int]]:
    """Split ``text`` into ``(surface, start, end)`` triples.

    Offsets are shifted by ``offset`` so callers can tokenize a sentence
    and keep spans relative to the whole abstract.
    """
    return [(m.group(), m.start() + offset, m.end() + offset) for m in _TOKEN_RE.finditer(text)]


# Tokens after which a period does not end a sentence.
ABBREVIATION_GUARD = frozenset(
    """
    vs v al e.g i.e etc approx fig figs dr mr mrs ms prof no nos vol ca cf
    resp inc ltd st jr sr eq eqs mg ml min max mo wk wks yr yrs hr hrs ref
    """.split()
)

_BOUNDARY_RE = re.compile(r"[.?!]+[\"')\]]*(?=\s+[\"'(\[]?[A-Z])")


def _guarded(text: str, end: int) -> bool:
    # word immediately before the terminal punctuation
    m = re.search(r"([A-Za-z][A-Za-z.]*)\.$", text[:end])
    if m is None:
        return False
    word = m.group(1).lower().rstrip(".")
    if word in ABBREVIATION_GUARD:
        return True
    # single initials ("J. Smith") and dotted forms like "i.e."
    return len(word) == 1 and word.isalpha() and m.group(1)[0].isupper()


def sentence_spans(text: str, offset: int = 0) -> List[Span]:
    """Character spans of the sentences of ``text``.

    A boundary is placed after ``.``, ``?`` or ``!`` when the next
    non-space character is a capital letter, unless the preceding word is a
    guarded abbreviation. Leading and trailing whitespace of each sentence is
    excluded from its span.
    """
    spans: List[Span] = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        end = m.end()
        if text[m.start()] == "." and _guarded(text, m.start() + 1):
            continue
        spans.append((start, end))
        start = end
    spans.append((start, len(text)))
    out = []
    for s, e in spans:
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if e > s:
            out.append((s + offset, e + offset))
    return out


def split_sentences(text: str) -> List[str]:
    """Split a paragraph into sentences.

    >>> split_sentences("Both solutions were instilled. Mean IOP fell.")
    ['Both solutions were instilled.', 'Mean IOP fell.']
    """
    return [text[s:e] for s, e in sentence_spans(text)]
