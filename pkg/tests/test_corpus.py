import string

import pytest
from hypothesis import given, settings, strategies as st

from rctextract.corpus import (
    LABELS, DecodeError, Label, OverlappingTags, SectionClass, UnbalancedTag, UnknownTag,
    decode_corpus, encode_corpus, make_abstract, parse_annotated, section_class, to_annotated,
)


def test_label_set():
    assert [l.value for l in LABELS] == ["P", "A1", "A2", "OC", "R1", "R2", "O"]
    assert len(Label) == 7


@pytest.mark.parametrize("heading,cls", [
    ("PATIENTS AND METHODS", SectionClass.METHODS),
    ("FINDINGS", SectionClass.RESULTS),
    ("ACKNOWLEDGEMENTS", SectionClass.NONE),
    ("purpose", SectionClass.OBJECTIVE),
    ("Main Results", SectionClass.RESULTS),
    ("BACKGROUND/AIMS", SectionClass.OBJECTIVE),
    ("APPLICATION TO CLINICAL PRACTICE", SectionClass.CONCLUSIONS),
    ("TRIAL REGISTRATION", SectionClass.BACKGROUND),
    ("EXPERIMENTAL METHODOLOGY", SectionClass.METHODS),
    ("KEY FINDINGS", SectionClass.RESULTS),
    ("CONCLUDING REMARKS", SectionClass.CONCLUSIONS),
])
def test_section_class(heading, cls):
    assert section_class(heading) is cls


def test_parse_methods_sentence():
    a = parse_annotated("<P>Patients</P> with Normal Tension Glaucoma were randomly assigned "
                        "to either <A1>Tafluprost</A1> or <A2>Placebo</A2>")
    gold = {t.surface: t.gold for t in a.tokens if t.gold is not Label.O}
    assert gold == {"Patients": Label.P, "Tafluprost": Label.A1, "Placebo": Label.A2}
    assert sum(t.gold is Label.O for t in a.tokens) == len(a.tokens) - 3
    assert "<" not in a.text


def test_no_tags_all_o():
    a = parse_annotated("Nothing is tagged in this sentence.")
    assert all(t.gold is Label.O for t in a.tokens)


@pytest.mark.parametrize("text,err", [
    ("<P>patients with <A1>drug</A1></P>", OverlappingTags),
    ("<P>patients", UnbalancedTag),
    ("patients</P>", UnbalancedTag),
    ("<X>patients</X>", UnknownTag),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_annotated(text)


def test_structured_flag_and_sections(table1):
    assert table1.structured
    assert table1.title.startswith("Intraocular pressure lowering")
    by_section = {t.section for t in table1.tokens}
    assert SectionClass.NONE not in by_section
    results = [t for t in table1.tokens if t.section is SectionClass.RESULTS]
    assert results[0].surface == "Mean"


def test_unstructured_single_paragraph():
    a = make_abstract("x", "t", [("", "One body only. Another sentence.")])
    assert not a.structured
    assert all(t.section is SectionClass.NONE for t in a.tokens)


def test_char_spans_increasing(table1):
    spans = [t.char_span for t in table1.tokens]
    assert all(s < e for s, e in spans)
    assert all(a[1] <= b[0] for a, b in zip(spans, spans[1:]))
    assert all(table1.span_text(t.char_span) == t.surface for t in table1.tokens)


def test_annotated_roundtrip_table1(table1, table1_text):
    assert to_annotated(table1) == table1_text.strip()


def test_corpus_roundtrip(table1):
    assert decode_corpus(encode_corpus([table1])) == [table1]


def test_empty_corpus():
    data = encode_corpus([])
    assert data.count(b"\n") == 1
    assert decode_corpus(data) == []


def test_corrupted_record_position(table1):
    lines = encode_corpus([table1, table1, table1]).decode().splitlines()
    lines[2] = lines[2][:40]
    with pytest.raises(DecodeError) as e:
        decode_corpus("\n".join(lines).encode())
    assert e.value.record == 2


def test_bad_header():
    with pytest.raises(DecodeError) as e:
        decode_corpus(b'{"format": "other"}\n')
    assert e.value.record == 0


_word = st.text(alphabet=string.ascii_letters, min_size=1, max_size=8)
_tag = st.sampled_from([None, None, None, "P", "A1", "A2", "OC", "R1", "R2"])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.tuples(_word, _tag), min_size=1, max_size=12), min_size=1, max_size=4),
       st.booleans())
def test_annotated_roundtrip_property(paragraphs, headed):
    lines = []
    heads = ["PURPOSE", "METHODS", "RESULTS", "CONCLUSIONS"]
    for k, words in enumerate(paragraphs):
        body = " ".join(f"<{t}>{w}</{t}>" if t else w for w, t in words)
        lines.append(f"{heads[k]}: {body}" if headed else body)
    text = "\n".join(lines)
    a = parse_annotated(text)
    assert to_annotated(a) == text
    assert decode_corpus(encode_corpus([a])) == [a]
    expected = [Label(t) if t else Label.O for words in paragraphs for _, t in words]
    assert a.labels == expected
