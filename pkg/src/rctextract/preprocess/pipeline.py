from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ..corpus import (
    Abstract, Chunk, GoldSpan, Label, SectionClass, Token, _paragraph_sections,
)
from ..text import sentence_spans, tokenize
from .abbrev import expand_tokens, guess_abbreviations, load_dictionary
from .normalize import NormToken, as_tag, normalize_tokens
from .semantics import Gazetteer, SemanticClass, classify_chunk, propagate_semantics
from .tagger import chunk, pos_tag

log = logging.getLogger(__name__)

#: POS tags that can never be the head of a target phrase.
POS_BLACKLIST = frozenset([
    "(", ")", ":", "CC", "DT", "EX", "FW", "IN", "LS", "PRP$", "WDT", "WP", "RP", "TO",
    "PRP", "WRB", "PDT", "WP$", "MD", "JJR", "JJS",
])

SECTION_ORDER = (
    SectionClass.BACKGROUND, SectionClass.OBJECTIVE, SectionClass.METHODS,
    SectionClass.RESULTS, SectionClass.CONCLUSIONS,
)

_OPEN = {"(", "["}
_CLOSE = {")", "]"}


@dataclass(frozen=True)
class Candidate:
    index: int  # 1-based position among candidates
    token_index: int  # position in Abstract.tokens
    token: Token


def section_blocks(n_sentences: int, n_blocks: int = 5) -> List[int]:
    """Sizes of ``n_blocks`` contiguous, near-equal blocks; earlier blocks take the remainder."""
    base, rem = divmod(n_sentences, n_blocks)
    return [base + (1 if i < rem else 0) for i in range(n_blocks)]


def assign_sections_unstructured(abstract: Abstract) -> Abstract:
    """Split the sentences into five equal blocks labeled in reading order."""
    if abstract.structured:
        raise ValueError("abstract is structured")
    sids = sorted({t.sentence_id for t in abstract.tokens})
    section_of: Dict[int, SectionClass] = {}
    pos = 0
    for cls, size in zip(SECTION_ORDER, section_blocks(len(sids))):
        for sid in sids[pos:pos + size]:
            section_of[sid] = cls
        pos += size
    tokens = tuple(replace(t, section=section_of[t.sentence_id]) for t in abstract.tokens)
    return replace(abstract, tokens=tokens)


def _assign_gold(tokens: List[Token], gold_spans: Sequence[GoldSpan]) -> List[Token]:
    out = []
    for i, t in enumerate(tokens):
        label = Label.O
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        # expansion words share one span: only the last (the head) keeps the label
        shared = nxt is not None and nxt.char_span == t.char_span
        if not shared:
            for g in gold_spans:
                if g.start < t.char_span[1] and t.char_span[0] < g.end:
                    label = g.label
                    break
        out.append(replace(t, gold=label) if label is not t.gold else t)
    return out


def _bracket_flags(words: Sequence[str]) -> List[bool]:
    depth, flags = 0, []
    for w in words:
        if w in _CLOSE:
            depth = max(0, depth - 1)
            flags.append(False)
        elif w in _OPEN:
            flags.append(False)
            depth += 1
        else:
            flags.append(depth > 0)
    return flags


def normalize_words(text: str, abbrev: Mapping[str, str]) -> List[NormToken]:
    """Expansion + normalization of a free string (e.g. a title)."""
    toks = [NormToken(w, s, e, as_tag(w)) for w, s, e in tokenize(text)]
    return normalize_tokens(expand_tokens(toks, abbrev, {}))


def preprocess(abstract: Abstract, dictionary: Optional[Mapping[str, str]] = None,
               gazetteer: Optional[Gazetteer] = None, guess_sections: bool = True) -> Abstract:
    """Run the full preprocessing chain on one abstract.

    Sentences are split per paragraph, abbreviations expanded, numbers
    normalized, tokens POS-tagged and chunked, chunks given semantic classes,
    and gold labels re-attached from the character-offset annotations.
    Unstructured abstracts get guessed sections when ``guess_sections``.
    """
    if dictionary is None:
        dictionary = load_dictionary()
    if gazetteer is None:
        gazetteer = Gazetteer.load()
    guessed = guess_abbreviations(abstract.title + "\n" + abstract.text)
    used: Dict[str, str] = {}
    sections = _paragraph_sections(abstract.paragraphs, abstract.structured)

    tokens: List[Token] = []
    chunks: List[Chunk] = []
    sentence_id = 0
    for pi, (para, sec) in enumerate(zip(abstract.paragraphs, sections)):
        body = abstract.text[para.start:para.end]
        si = 0
        for s, e in sentence_spans(body, para.start):
            raw = [NormToken(w, a, b, as_tag(w)) for w, a, b in tokenize(abstract.text[s:e], s)]
            for t in raw:
                long_form = guessed.get(t.text) or dictionary.get(t.text)
                if long_form:
                    used[t.text] = long_form
            toks = normalize_tokens(expand_tokens(raw, dictionary, guessed))
            if not toks:
                continue
            words = [t.text for t in toks]
            tags = pos_tag(words)
            inside = _bracket_flags(words)
            sem = [SemanticClass.NONE] * len(words)
            base = len(tokens)
            chunk_ids = [0] * len(words)
            for cs, ce, ctype in chunk(tags):
                cls = classify_chunk(words[cs:ce], gazetteer)
                sem[cs:ce] = propagate_semantics(cls, words[cs:ce])
                for k in range(cs, ce):
                    chunk_ids[k] = len(chunks)
                chunks.append(Chunk(base + cs, base + ce, ctype, cls.value))
            for k, t in enumerate(toks):
                tokens.append(Token(
                    surface=abstract.text[t.start:t.end],
                    normalized=t.text,
                    char_span=(t.start, t.end),
                    pos=tags[k],
                    chunk_id=chunk_ids[k],
                    sentence_index=si,
                    sentence_id=sentence_id,
                    paragraph_index=pi,
                    paragraph_heading=para.heading,
                    section=sec,
                    semantic_class=sem[k].value,
                    in_brackets=inside[k],
                ))
            si += 1
            sentence_id += 1

    tokens = _assign_gold(tokens, abstract.gold_spans)
    out = replace(
        abstract, tokens=tuple(tokens), chunks=tuple(chunks),
        abbrev_map=tuple(sorted(used.items())), preprocessed=True,
    )
    if not abstract.structured and guess_sections and tokens:
        out = assign_sections_unstructured(out)
    return out


def filter_candidates(abstract: Abstract) -> List[Candidate]:
    """Tokens eligible for a target label, numbered 1..N in reading order.

    Tokens in CONCLUSIONS paragraphs and tokens with a blacklisted POS tag are
    removed. Removing a gold-labeled token is logged, not raised.
    """
    out: List[Candidate] = []
    for i, t in enumerate(abstract.tokens):
        if t.section is SectionClass.CONCLUSIONS or t.pos in POS_BLACKLIST:
            if t.gold is not Label.O:
                log.warning("%s: gold %s token %r removed by filtering", abstract.id, t.gold, t.surface)
            continue
        out.append(Candidate(len(out) + 1, i, t))
    return out


class Preprocessor(BaseEstimator, TransformerMixin):
    """Transformer wrapping :func:`preprocess` for use in pipelines.

    Parameters
    ----------
    abbreviations : path or None
        Abbreviation dictionary file; the packaged one when None.
    extra_abbreviations : dict or None
        Entries added on top of the dictionary file.
    gazetteer : path or None
        Gazetteer file; the packaged one when None.
    guess_sections : bool
        Assign sections to unstructured abstracts by the five-block heuristic.
    """

    def __init__(self, abbreviations=None, extra_abbreviations=None, gazetteer=None,
                 guess_sections=True):
        self.abbreviations = abbreviations
        self.extra_abbreviations = extra_abbreviations
        self.gazetteer = gazetteer
        self.guess_sections = guess_sections

    def fit(self, X, y=None):
        self.dictionary_ = load_dictionary(self.abbreviations)
        self.dictionary_.update(self.extra_abbreviations or {})
        self.gazetteer_ = Gazetteer.load(self.gazetteer)
        return self

    def transform(self, X):
        check_is_fitted(self, "dictionary_")
        return [
            a if a.preprocessed else preprocess(a, self.dictionary_, self.gazetteer_, self.guess_sections)
            for a in X
        ]
