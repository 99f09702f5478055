"""Minimal fallback POS tagger and rule-based chunker.

Only coarse Penn-style tags are needed downstream (candidate filtering and
POS window features), so a closed-class lexicon plus suffix rules suffices.
"""
from __future__ import annotations

import re
from typing import List, Sequence, Tuple

from ..corpus import ChunkType
from .normalize import as_tag

_LEXICON = {}


def _add(tag: str, words: str) -> None:
    for w in words.split():
        _LEXICON[w] = tag


_add("DT", "the a an this that these those each every all no some any another both either neither such")
_add("PDT", "half")
_add("CC", "and or but nor plus")
_add("IN", (
    "of in on at by with from for as into onto than between among after before during "
    "within without under over through throughout versus vs against per via upon about "
    "since until while whereas although because if whether compared toward towards across "
    "following despite beyond except unlike like"
))
_add("TO", "to")
_add("EX", "there")
_add("PRP", "it they we he she i you them us him her itself themselves")
_add("PRP$", "its their our his my your")
_add("MD", "can could may might will would should must shall")
_add("WDT", "which whichever")
_add("WP", "who whom what")
_add("WP$", "whose")
_add("WRB", "when where how why")
_add("RP", "up out off")
_add("JJR", "higher lower greater smaller larger better worse fewer less more older younger longer shorter")
_add("JJS", "highest lowest greatest smallest largest best worst fewest least most")
_add("VBD", "was were had did")
_add("VBZ", "is has does")
_add("VBP", "are have do")
_add("VB", "be")
_add("VBN", "been")
_add("VBG", "being")
_add("RB", "not also only very significantly statistically well however then thus therefore respectively")
_add("CD", "one two three four five six seven eight nine ten")
_add("FW", "et al")

_PUNCT = {
    "(": "(", "[": "(", "{": "(", ")": ")", "]": ")", "}": ")",
    ":": ":", ";": ":", "-": ":", "–": ":", "—": ":",
    ",": ",", ".": ".", "?": ".", "!": ".",
}

_SUFFIXES: List[Tuple[str, str]] = [
    ("ly", "RB"),
    ("ing", "VBG"),
    ("ed", "VBN"),
    ("ous", "JJ"), ("ive", "JJ"), ("ful", "JJ"), ("able", "JJ"), ("ible", "JJ"),
    ("al", "JJ"), ("ic", "JJ"), ("ar", "JJ"), ("less", "JJ"),
    ("ss", "NN"), ("us", "NN"), ("is", "NN"),
    ("s", "NNS"),
]

_NUMBER_RE = re.compile(r"^[-−+]?(\d[\d,]*(\.\d+)?|\.\d+)$")


def tag_word(word: str) -> str:
    if as_tag(word) is not None or _NUMBER_RE.match(word):
        return "CD"
    if word in _PUNCT:
        return _PUNCT[word]
    if not any(c.isalnum() for c in word):
        return "SYM"
    lw = word.lower()
    if lw in _LEXICON:
        return _LEXICON[lw]
    if len(lw) > 3:
        for suffix, tag in _SUFFIXES:
            if lw.endswith(suffix):
                return tag
    return "NN"


def pos_tag(words: Sequence[str]) -> List[str]:
    return [tag_word(w) for w in words]


_NP_TAGS = frozenset("DT PDT PRP$ JJ JJR JJS NN NNS NNP NNPS CD".split())
_VP_TAGS = frozenset("MD VB VBD VBG VBN VBP VBZ RB RBR RBS RP".split())


def _kind(tag: str) -> ChunkType:
    if tag in _NP_TAGS:
        return ChunkType.NP
    if tag in _VP_TAGS:
        return ChunkType.VP
    if tag in ("IN", "TO"):
        return ChunkType.PP
    return ChunkType.OTHER


def chunk(tags: Sequence[str]) -> List[Tuple[int, int, ChunkType]]:
    """Partition a tagged sentence into ``(start, end, type)`` chunks.

    NP and VP chunks are maximal runs; a determiner always opens a new NP.
    PP and other chunks are single tokens.
    """
    out: List[Tuple[int, int, ChunkType]] = []
    i = 0
    while i < len(tags):
        kind = _kind(tags[i])
        j = i + 1
        if kind in (ChunkType.NP, ChunkType.VP):
            while j < len(tags) and _kind(tags[j]) is kind and not (kind is ChunkType.NP and tags[j] == "DT"):
                j += 1
        out.append((i, j, kind))
        i = j
    return out
