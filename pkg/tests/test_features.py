import numpy as np
from hypothesis import given, strategies as st

from rctextract.corpus import make_abstract
from rctextract.features import (
    AbstractContext, FeatureDictionary, TokenFeaturizer, extract_features, fit_dictionary,
    position_bin, vectorize,
)
from rctextract.preprocess import preprocess


def _doc():
    a = make_abstract("f", "Timolol in patients with ocular hypertension", [
        ("METHODS", "A total of 268 patients with ocular hypertension were enrolled."),
        ("RESULTS", "Mean IOP fell in the timolol group (P<0.001) at 4 weeks."),
    ])
    return preprocess(a)


def _feats(doc, surface):
    i = next(k for k, t in enumerate(doc.tokens) if t.surface == surface)
    return extract_features(doc, i), doc.tokens[i]


def test_patients_features():
    doc = _doc()
    f, tok = _feats(doc, "patients")
    assert "w=patients" in f and "sem=PATIENTS" in f and "intitle=T" in f
    assert "sec=METHODS" in f and "head=METHODS" in f
    assert "sem&sec=PATIENTS&METHODS" in f and "intitle&sem=T&PATIENTS" in f
    assert "spos=0" in f


def test_bracket_flag():
    doc = _doc()
    f, tok = _feats(doc, "P<0.001")
    assert tok.normalized == "_PVAL_"
    assert "inbr=T" in f and "w=_PVAL_" in f


def test_sentence_start_window():
    doc = _doc()
    f, _ = _feats(doc, "A")
    assert "bi=none|a" in f
    assert "pos[-1]=none" in f and "pos[-2]=none" in f


def test_window_stays_in_sentence():
    doc = _doc()
    f, _ = _feats(doc, "Mean")
    assert "pos[-1]=none" in f and "bi=none|mean" in f
    last = max(i for i, t in enumerate(doc.tokens) if t.sentence_id == doc.tokens[0].sentence_id)
    fl = extract_features(doc, last)
    assert "pos[1]=none" in fl and "pos[2]=none" in fl


def test_pure_function():
    doc = _doc()
    ctx = AbstractContext(doc)
    for i in range(len(doc.tokens)):
        assert extract_features(doc, i) == extract_features(doc, i, ctx)


def test_namespaces_do_not_collide():
    doc = _doc()
    f, _ = _feats(doc, "group")
    assert "w=group" in f and "cbow=group" in f


@given(st.integers(1, 200), st.data())
def test_position_bin_range(n, data):
    i = data.draw(st.integers(0, n - 1))
    b = position_bin(i, n)
    assert 0 <= b <= 9
    assert position_bin(0, n) == 0
    if n > 1:
        assert position_bin(n - 1, n) == 9


def test_dictionary():
    d = fit_dictionary([["a", "b"], ["b", "c"]])
    assert d.features() == ["a", "b", "c"] and d.frozen
    assert len(fit_dictionary([])) == 0
    assert vectorize(["a", "c", "c"], d) == [0, 2]
    assert vectorize(["zz"], d) == []
    assert fit_dictionary([["a", "b"], ["b", "c"]]) == d


def test_featurizer_binary_matrix():
    X = TokenFeaturizer().fit([["a", "b"], ["b", "b", "c"]]).transform([["b", "b", "x"], []])
    assert X.shape == (2, 3)
    assert np.array_equal(X.toarray(), [[0, 1, 0], [0, 0, 0]])


def test_frozen_dictionary_rejects_new():
    d = FeatureDictionary(["a"]).freeze()
    assert d.add("a") == 0
    try:
        d.add("b")
    except RuntimeError:
        pass
    else:
        raise AssertionError("frozen dictionary accepted a new feature")
