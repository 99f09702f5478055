"""Data model for abstracts, annotation parsing and corpus file I/O."""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .text import tokenize


class Label(str, enum.Enum):
    P = "P"
    A1 = "A1"
    A2 = "A2"
    OC = "OC"
    R1 = "R1"
    R2 = "R2"
    O = "O"

    def __str__(self) -> str:
        return self.value


#: Fixed label order used by the classifier and the decoder.
LABELS: Tuple[Label, ...] = tuple(Label)
#: The six target labels (everything but the null class).
TARGET_LABELS: Tuple[Label, ...] = LABELS[:-1]


class SectionClass(str, enum.Enum):
    BACKGROUND = "BACKGROUND"
    OBJECTIVE = "OBJECTIVE"
    METHODS = "METHODS"
    RESULTS = "RESULTS"
    CONCLUSIONS = "CONCLUSIONS"
    NONE = "NONE"

    def __str__(self) -> str:
        return self.value


SECTION_LABELS: Dict[SectionClass, Tuple[str, ...]] = {
    SectionClass.BACKGROUND: (
        "INTRODUCTION", "TRIAL REGISTRATION", "BACKGROUND", "FINANCIAL DISCLOSURE(S)",
        "FINANCIAL DISCLOSURE", "FINANCIAL DISCLOSURES", "CLINICAL TRIAL REGISTRATION",
    ),
    SectionClass.OBJECTIVE: (
        "AIMS", "BACKGROUND/AIMS", "AIM", "PURPOSE", "OBJECTIVE", "INTRODUCTION AND PURPOSE",
    ),
    SectionClass.METHODS: (
        "SETTING", "PATIENTS AND METHODS", "METHODS", "STUDY DESIGN AND METHODS",
        "RESEARCH DESIGN AND METHODS", "STATISTICS", "SUBJECTS AND METHODS", "METHOD",
        "PARTICIPANTS", "MAIN OUTCOME MEASURES", "DESIGN", "OUTCOME MEASUREMENT",
        "INTERVENTIONS", "MATERIALS AND METHODS", "INTERVENTION",
    ),
    SectionClass.RESULTS: ("RESULTS", "FINDINGS", "MAIN RESULTS"),
    SectionClass.CONCLUSIONS: (
        "APPLICATION TO CLINICAL PRACTICE", "CONCLUSION", "CONCLUSIONS", "DISCUSSION",
    ),
}

_HEADING_INDEX = {h: cls for cls, heads in SECTION_LABELS.items() for h in heads}


def section_class(heading: str) -> SectionClass:
    """Map a paragraph heading to its section class.

    Lookup is exact (after upper-casing and whitespace collapsing) against the
    known heading lists, then falls back to keyword containment.
    """
    key = " ".join(heading.upper().replace(":", " ").split())
    if key in _HEADING_INDEX:
        return _HEADING_INDEX[key]
    if "METHOD" in key:
        return SectionClass.METHODS
    if "RESULT" in key or "FINDING" in key:
        return SectionClass.RESULTS
    if "CONCLU" in key:
        return SectionClass.CONCLUSIONS
    return SectionClass.NONE


class ChunkType(str, enum.Enum):
    NP = "NP"
    VP = "VP"
    PP = "PP"
    OTHER = "other"

    def __str__(self) -> str:
        return self.value


# --------------------------------------------------------------------------
# errors


class CorpusError(ValueError):
    pass


class UnbalancedTag(CorpusError):
    pass


class OverlappingTags(CorpusError):
    pass


class UnknownTag(CorpusError):
    pass


class DecodeError(CorpusError):
    def __init__(self, message: str, record: int):
        super().__init__(f"record {record}: {message}")
        self.record = record


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    char_span: Tuple[int, int]
    pos: str = ""
    chunk_id: int = -1
    sentence_index: int = 0
    sentence_id: int = 0
    paragraph_index: int = 0
    paragraph_heading: str = ""
    section: SectionClass = SectionClass.NONE
    semantic_class: str = "none"
    in_brackets: bool = False
    gold: Label = Label.O

    def __post_init__(self):
        if not self.char_span[0] < self.char_span[1]:
            raise ValueError(f"empty char span {self.char_span!r}")
        if self.sentence_index < 0:
            raise ValueError("sentence_index must be >= 0")


@dataclass(frozen=True)
class Chunk:
    start: int  # abstract-relative token index, inclusive
    end: int  # exclusive
    chunk_type: ChunkType
    semantic_class: str = "none"


@dataclass(frozen=True)
class Paragraph:
    heading: str
    start: int  # char offset into Abstract.text
    end: int


@dataclass(frozen=True)
class GoldSpan:
    start: int
    end: int
    label: Label


@dataclass(frozen=True)
class Abstract:
    """A single abstract.

    ``text`` is the abstract body: paragraph texts joined by newlines, with
    headings stored separately. Every ``char_span`` indexes into ``text``.
    """

    id: str
    title: str
    text: str
    paragraphs: Tuple[Paragraph, ...]
    tokens: Tuple[Token, ...] = ()
    chunks: Tuple[Chunk, ...] = ()
    gold_spans: Tuple[GoldSpan, ...] = ()
    structured: bool = False
    abbrev_map: Tuple[Tuple[str, str], ...] = ()
    preprocessed: bool = False

    @property
    def labels(self) -> List[Label]:
        return [t.gold for t in self.tokens]

    def span_text(self, span: Tuple[int, int]) -> str:
        return self.text[span[0]:span[1]]

    def paragraph_text(self, i: int) -> str:
        p = self.paragraphs[i]
        return self.text[p.start:p.end]


def paragraph_of(abstract: Abstract, offset: int) -> int:
    for i, p in enumerate(abstract.paragraphs):
        if p.start <= offset < p.end:
            return i
    raise ValueError(f"offset {offset} outside every paragraph")


def _paragraph_sections(paragraphs: Sequence[Paragraph], structured: bool) -> List[SectionClass]:
    # unknown headings in a structured abstract inherit the previous class
    out = []
    prev = SectionClass.BACKGROUND
    for p in paragraphs:
        cls = section_class(p.heading) if p.heading else SectionClass.NONE
        if structured and cls is SectionClass.NONE:
            cls = prev
        out.append(cls)
        prev = cls
    return out


def gold_for_span(gold_spans: Iterable[GoldSpan], span: Tuple[int, int]) -> Label:
    for g in gold_spans:
        if g.start < span[1] and span[0] < g.end:
            return g.label
    return Label.O


def raw_tokens(text: str, paragraphs: Sequence[Paragraph], structured: bool,
               gold_spans: Sequence[GoldSpan] = ()) -> Tuple[Token, ...]:
    """Plain whitespace/punctuation tokenization, before any preprocessing."""
    sections = _paragraph_sections(paragraphs, structured)
    toks = []
    for pi, (p, sec) in enumerate(zip(paragraphs, sections)):
        for surface, s, e in tokenize(text[p.start:p.end], p.start):
            toks.append(Token(
                surface=surface, normalized=surface, char_span=(s, e),
                paragraph_index=pi, paragraph_heading=p.heading, section=sec,
                gold=gold_for_span(gold_spans, (s, e)),
            ))
    return tuple(toks)


def make_abstract(id: str, title: str, sections: Sequence[Tuple[str, str]],
                  gold_spans: Sequence[GoldSpan] = ()) -> Abstract:
    """Build an abstract from ``(heading, body)`` pairs; empty headings allowed."""
    parts, paragraphs, pos = [], [], 0
    for heading, body in sections:
        if parts:
            pos += 1
        paragraphs.append(Paragraph(heading, pos, pos + len(body)))
        parts.append(body)
        pos += len(body)
    text = "\n".join(parts)
    structured = sum(1 for h, _ in sections if h) >= 2
    return Abstract(
        id=id, title=title, text=text, paragraphs=tuple(paragraphs),
        tokens=raw_tokens(text, paragraphs, structured, gold_spans),
        gold_spans=tuple(gold_spans), structured=structured,
    )


# --------------------------------------------------------------------------
# annotated text

TAG_NAMES = tuple(l.value for l in TARGET_LABELS)
_TAG_RE = re.compile(r"<(/?)([A-Za-z0-9]+)\s*>")
_HEADING_RE = re.compile(r"^([A-Z][A-Z0-9 /&(),'-]*[A-Z)]):[ \t]*")


def _strip_tags(text: str) -> Tuple[str, List[GoldSpan]]:
    out, spans = [], []
    open_tag: Optional[Tuple[str, int]] = None
    pos = 0
    for m in _TAG_RE.finditer(text):
        out.append(text[pos:m.start()])
        pos = m.end()
        closing, name = m.group(1) == "/", m.group(2)
        if name not in TAG_NAMES:
            raise UnknownTag(f"unknown tag <{m.group(1)}{name}>")
        here = sum(len(x) for x in out)
        if not closing:
            if open_tag is not None:
                raise OverlappingTags(f"<{name}> opened inside <{open_tag[0]}>")
            open_tag = (name, here)
        else:
            if open_tag is None or open_tag[0] != name:
                if open_tag is None:
                    raise UnbalancedTag(f"</{name}> without opening tag")
                raise OverlappingTags(f"</{name}> closes <{open_tag[0]}>")
            spans.append(GoldSpan(open_tag[1], here, Label(name)))
            open_tag = None
    if open_tag is not None:
        raise UnbalancedTag(f"<{open_tag[0]}> never closed")
    out.append(text[pos:])
    return "".join(out), spans


def _trim_span(text: str, g: GoldSpan) -> GoldSpan:
    s, e = g.start, g.end
    while s < e and text[s].isspace():
        s += 1
    while e > s and text[e - 1].isspace():
        e -= 1
    return GoldSpan(s, e, g.label)


def parse_annotated(text: str, id: str = "") -> Abstract:
    """Parse annotated abstract text into an :class:`Abstract`.

    Tags ``<P>``, ``<A1>``, ``<A2>``, ``<OC>``, ``<R1>``, ``<R2>`` enclose head
    tokens; they may not nest. Non-empty lines are paragraphs; a line starting
    with an upper-case ``HEADING:`` prefix is a labeled paragraph, and a
    ``TITLE:`` line sets the title.
    """
    title = ""
    sections: List[Tuple[str, str, List[GoldSpan]]] = []
    for line in text.splitlines():
        if not line.strip():
            continue
        heading = ""
        m = _HEADING_RE.match(line)
        if m:
            heading, line = m.group(1), line[m.end():]
        body, spans = _strip_tags(line)
        if heading.upper() == "TITLE":
            title = body.strip()
            continue
        lead = len(body) - len(body.lstrip())
        body_s = body.strip()
        spans = [GoldSpan(g.start - lead, g.end - lead, g.label) for g in spans]
        sections.append((heading, body_s, spans))
    gold, pos = [], 0
    for i, (_, body, spans) in enumerate(sections):
        if i:
            pos += 1
        for g in spans:
            g = _trim_span(body, g)
            if g.end > g.start:
                gold.append(GoldSpan(g.start + pos, g.end + pos, g.label))
        pos += len(body)
    return make_abstract(id, title, [(h, b) for h, b, _ in sections], gold)


def to_annotated(abstract: Abstract) -> str:
    """Inverse of :func:`parse_annotated` (up to whitespace)."""
    lines = []
    if abstract.title:
        lines.append(f"TITLE: {abstract.title}")
    for p in abstract.paragraphs:
        inserts = []
        for g in abstract.gold_spans:
            if p.start <= g.start < p.end:
                inserts.append((g.start - p.start, g.end - p.start, g.label.value))
        body = abstract.text[p.start:p.end]
        for s, e, name in sorted(inserts, reverse=True):
            body = f"{body[:s]}<{name}>{body[s:e]}</{name}>{body[e:]}"
        lines.append(f"{p.heading}: {body}" if p.heading else body)
    return "\n".join(lines)


# --------------------------------------------------------------------------
# corpus files

CORPUS_FORMAT = "rctextract-corpus"
CORPUS_VERSION = 1


def _token_to_list(t: Token) -> list:
    return [
        t.surface, t.normalized, list(t.char_span), t.pos, t.chunk_id, t.sentence_index,
        t.sentence_id, t.paragraph_index, t.paragraph_heading, t.section.value,
        t.semantic_class, t.in_brackets, t.gold.value,
    ]


def _token_from_list(v: list) -> Token:
    return Token(
        surface=v[0], normalized=v[1], char_span=(int(v[2][0]), int(v[2][1])), pos=v[3],
        chunk_id=int(v[4]), sentence_index=int(v[5]), sentence_id=int(v[6]),
        paragraph_index=int(v[7]), paragraph_heading=v[8], section=SectionClass(v[9]),
        semantic_class=v[10], in_brackets=bool(v[11]), gold=Label(v[12]),
    )


def abstract_to_record(a: Abstract) -> dict:
    return {
        "id": a.id,
        "title": a.title,
        "text": a.text,
        "paragraphs": [{"heading": p.heading, "start": p.start, "end": p.end} for p in a.paragraphs],
        "gold": [[g.start, g.end, g.label.value] for g in a.gold_spans],
        "structured": a.structured,
        "abbrev_map": [list(kv) for kv in a.abbrev_map],
        "preprocessed": a.preprocessed,
        "tokens": [_token_to_list(t) for t in a.tokens],
        "chunks": [[c.start, c.end, c.chunk_type.value, c.semantic_class] for c in a.chunks],
    }


def abstract_from_record(r: dict) -> Abstract:
    return Abstract(
        id=r["id"],
        title=r["title"],
        text=r["text"],
        paragraphs=tuple(Paragraph(p["heading"], int(p["start"]), int(p["end"])) for p in r["paragraphs"]),
        gold_spans=tuple(GoldSpan(int(s), int(e), Label(l)) for s, e, l in r["gold"]),
        structured=bool(r["structured"]),
        abbrev_map=tuple((k, v) for k, v in r.get("abbrev_map", [])),
        preprocessed=bool(r.get("preprocessed", False)),
        tokens=tuple(_token_from_list(t) for t in r.get("tokens", [])),
        chunks=tuple(Chunk(int(s), int(e), ChunkType(t), c) for s, e, t, c in r.get("chunks", [])),
    )


def encode_corpus(abstracts: Iterable[Abstract]) -> bytes:
    """Serialize to line-delimited JSON: a header line, then one abstract per line."""
    lines = [json.dumps({"format": CORPUS_FORMAT, "version": CORPUS_VERSION}, sort_keys=True)]
    for a in abstracts:
        lines.append(json.dumps(abstract_to_record(a), ensure_ascii=False, sort_keys=True))
    return ("\n".join(lines) + "\n").encode("utf-8")


def decode_corpus(data: bytes) -> List[Abstract]:
    """Inverse of :func:`encode_corpus`. Records are numbered from 1, the header is record 0."""
    lines = data.decode("utf-8").splitlines()
    if not lines:
        raise DecodeError("missing header", 0)
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise DecodeError(f"bad header: {e}", 0) from None
    if not isinstance(header, dict) or header.get("format") != CORPUS_FORMAT:
        raise DecodeError("not a corpus file", 0)
    if header.get("version") != CORPUS_VERSION:
        raise DecodeError(f"unsupported version {header.get('version')!r}", 0)
    out = []
    for n, line in enumerate(lines[1:], start=1):
        if not line.strip():
            continue
        try:
            out.append(abstract_from_record(json.loads(line)))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, IndexError) as e:
            raise DecodeError(str(e), n) from None
    return out


def read_corpus(path) -> List[Abstract]:
    with open(path, "rb") as fh:
        return decode_corpus(fh.read())


def write_corpus(path, abstracts: Iterable[Abstract]) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_corpus(abstracts))


def with_tokens(abstract: Abstract, tokens: Sequence[Token], **changes) -> Abstract:
    return replace(abstract, tokens=tuple(tokens), **changes)
