"""Abbreviation guessing and expansion."""
from __future__ import annotations

import re
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence

from ..text import tokenize
from .normalize import NormToken, as_tag

# skipped when counting the words of a long form
STOPWORDS = frozenset(
    "a an and the of in on for to with by at or from as into via vs versus".split()
)

_PAREN_RE = re.compile(r"\(\s*([A-Z][A-Z]+)\s*\)")
_WORD_RE = re.compile(r"[^\W_][\w'-]*")


def _initials_match(words: Sequence[str], short: str) -> bool:
    content = [w for w in words if w.lower() not in STOPWORDS]
    return len(content) == len(short) and all(
        w[0].lower() == c.lower() for w, c in zip(content, short)
    )


def _by_initials(words: List[str], short: str) -> Optional[List[str]]:
    # walk back until len(short) content words have been collected
    need, i = len(short), len(words)
    while i > 0 and need > 0:
        i -= 1
        if words[i].lower() not in STOPWORDS:
            need -= 1
    if need:
        return None
    cand = words[i:]
    return cand if _initials_match(cand, short) else None


def _by_letters(words: List[str], short: str) -> Optional[List[str]]:
    # each letter of the short form appears in order; the first one starts a word
    window = words[-min(len(short) + 5, 2 * len(short)):]
    text = " ".join(window)
    si, li = len(short) - 1, len(text) - 1
    while si >= 0:
        c = short[si].lower()
        while li >= 0 and (
            text[li].lower() != c or (si == 0 and li > 0 and text[li - 1].isalnum())
        ):
            li -= 1
        if li < 0:
            return None
        si -= 1
        li -= 1
    start = li + 1
    long_form = text[start:]
    if start and text[start - 1].isalnum():
        return None
    out = long_form.split()
    if not out or out[0].lower() in STOPWORDS or len(out) > len(short) + 2:
        return None
    return out


def guess_abbreviations(text: str) -> Dict[str, str]:
    """Find ``long form (ABBR)`` definitions in ``text``.

    Only all-capital parenthesized words qualify, so plural forms such as
    ``(IOPs)`` are ignored. The preceding words are matched first by initials
    (stopwords skipped), then by an in-order letter match.

    >>> guess_abbreviations("This Is An Example (TIAE) of it")
    {'TIAE': 'This Is An Example'}
    """
    found: Dict[str, str] = {}
    for m in _PAREN_RE.finditer(text):
        short = m.group(1)
        before = text[:m.start()]
        # do not look across a sentence or clause boundary
        cut = max(before.rfind(ch) for ch in ".;:()[]")
        words = _WORD_RE.findall(before[cut + 1:])
        if not words:
            continue
        long_words = _by_initials(words, short) or _by_letters(words, short)
        if long_words and short not in found:
            found[short] = " ".join(long_words)
    return found


def load_dictionary(path=None) -> Dict[str, str]:
    """Read a tab-separated ``ABBR<TAB>expansion`` file (``#`` comments allowed)."""
    if path is None:
        raw = resources.files("rctextract.preprocess").joinpath("data/abbreviations.tsv").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    out = {}
    for n, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path or 'abbreviations.tsv'}:{n}: expected 2 tab-separated fields")
        out[parts[0].strip()] = parts[1].strip()
    return out


def expand_tokens(tokens: Sequence[NormToken], dictionary: Mapping[str, str],
                  guessed: Mapping[str, str]) -> List[NormToken]:
    """Replace every token equal to a known short form by its expansion words.

    The guessed map wins over the dictionary. All expansion words share the
    span of the short form they replace.
    """
    out = []
    for t in tokens:
        long_form = guessed.get(t.text) or dictionary.get(t.text)
        if not long_form:
            out.append(t)
            continue
        for w, _, _ in tokenize(long_form):
            out.append(NormToken(w, t.start, t.end, as_tag(w)))
    return out


def expand_text(text: str, dictionary: Mapping[str, str], guessed: Mapping[str, str]) -> str:
    """String-level expansion of standalone short forms."""
    def sub(m):
        w = m.group()
        return guessed.get(w) or dictionary.get(w) or w
    return re.sub(r"(?<![\w-])[A-Za-z][\w]*(?![\w-])", sub, text)
