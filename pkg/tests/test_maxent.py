import json
import math

import numpy as np
import pytest
import scipy.sparse as sp
from oracles import fd_gradient, max_relative_error
from hypothesis import example, given, settings, strategies as st

from rctextract.corpus import LABELS
from rctextract.maxent import (
    DimensionMismatch, MaxEntClassifier, NonFiniteLoss, loss_and_gradient, softmax,
)


def rel_error(a, b):
    return max_relative_error(a, b)


def random_problem(rng, n=5, d=10):
    X = (rng.random((n, d)) < 0.4).astype(float)
    y = rng.integers(0, 7, size=n)
    W = rng.normal(scale=0.5, size=(7, d))
    b = rng.normal(scale=0.5, size=7)
    return W, b, X, y


def test_gradient_matches_finite_differences():
    W, b, X, y = random_problem(np.random.default_rng(0))
    _, dW, db = loss_and_gradient(W, b, X, y, l2=0.3)
    nW, nb = fd_gradient(W, b, X, y, 0.3)
    assert rel_error(dW, nW) < 1e-5 and rel_error(db, nb) < 1e-5


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.0, 0.1, 1.0]))
@example(seed=6695403, l2=1.0)
def test_gradient_property(seed, l2):
    W, b, X, y = random_problem(np.random.default_rng(seed), n=4, d=6)
    _, dW, db = loss_and_gradient(W, b, sp.csr_matrix(X), y, l2=l2)
    nW, nb = fd_gradient(W, b, X, y, l2)
    assert rel_error(dW, nW) < 1e-5 and rel_error(db, nb) < 1e-5


def test_uniform_loss():
    X = np.ones((4, 3))
    loss, _, _ = loss_and_gradient(np.zeros((7, 3)), np.zeros(7), X, np.array([0, 1, 2, 6]))
    assert loss == pytest.approx(4 * math.log(7), abs=1e-12)


def test_duplicated_batch_doubles():
    W, b, X, y = random_problem(np.random.default_rng(3))
    l1, gW1, gb1 = loss_and_gradient(W, b, X, y)
    l2_, gW2, gb2 = loss_and_gradient(W, b, np.vstack([X, X]), np.concatenate([y, y]))
    assert l2_ == pytest.approx(2 * l1, rel=1e-13)
    assert np.allclose(gW2, 2 * gW1, rtol=1e-12, atol=1e-14)
    assert np.allclose(gb2, 2 * gb1, rtol=1e-12, atol=1e-14)


def test_separable_toy_set():
    rng = np.random.default_rng(1)
    X = np.zeros((20, 4))
    y = np.array(["P"] * 10 + ["O"] * 10)
    X[:10, 0] = 1
    X[10:, 1] = 1
    X[:, 2:] = rng.random((20, 2)) < 0.5
    clf = MaxEntClassifier(l2=0.01, solver="gd", max_iter=300).fit(X, y)
    h = clf.loss_history_
    assert all(b <= a + 1e-12 for a, b in zip(h, h[1:]))
    assert (clf.predict(X) == y).all()


def test_zero_iterations_uniform():
    X = np.eye(7)
    clf = MaxEntClassifier(max_iter=0).fit(X, list(LABELS))
    assert np.allclose(clf.predict_proba(X), 1 / 7, atol=1e-15)


def test_empty_examples():
    with pytest.raises(DimensionMismatch):
        MaxEntClassifier().fit(np.zeros((0, 3)), [])


def test_mismatched_lengths():
    with pytest.raises(DimensionMismatch):
        MaxEntClassifier().fit(np.zeros((3, 3)), ["O", "P"])


def test_non_finite_input():
    X = np.array([[np.inf, 0.0], [0.0, 1.0]])
    with pytest.raises((NonFiniteLoss, ValueError)):
        MaxEntClassifier().fit(X, ["O", "P"])


def _fitted(d=5):
    rng = np.random.default_rng(5)
    X = (rng.random((60, d)) < 0.5).astype(float)
    y = [LABELS[k] for k in rng.integers(0, 7, size=60)]
    return MaxEntClassifier(l2=0.5).fit(X, y), X, y


def test_bias_on_o():
    clf, X, _ = _fitted()
    clf.coef_[:] = 0
    clf.intercept_[:] = 0
    clf.intercept_[6] = 10.0
    assert (clf.predict_proba(X)[:, 6] > 0.99).all()
    assert np.allclose(clf.predict_proba(np.zeros((1, 5))), softmax(clf.intercept_[None, :]))


def test_proba_sums_and_shift_invariance():
    clf, X, _ = _fitted()
    p = clf.predict_proba(X)
    assert np.max(np.abs(p.sum(axis=1) - 1)) <= 1e-12
    assert ((p > 0) & (p < 1)).all()
    shifted = clf.__class__.from_dict(clf.to_dict())
    shifted.coef_ = shifted.coef_ + np.arange(5.0)[None, :]
    assert np.allclose(shifted.predict_proba(X), p, atol=1e-12)


def test_training_beats_zero_model():
    clf, X, y = _fitted()
    zero = MaxEntClassifier(l2=0.5, max_iter=0).fit(X, y)
    assert clf.objective(X, y) <= zero.objective(X, y)


def test_model_roundtrip_exact():
    clf, X, _ = _fitted()
    doc = clf.to_dict([f"f{i}" for i in range(5)])
    back = MaxEntClassifier.from_dict(json.loads(json.dumps(doc)))
    assert np.array_equal(back.coef_, clf.coef_) and np.array_equal(back.intercept_, clf.intercept_)
    assert np.array_equal(back.predict_proba(X), clf.predict_proba(X))
    assert doc["labels"] == [l.value for l in LABELS]


def test_deterministic_fit():
    a, X, y = _fitted()
    b = MaxEntClassifier(l2=0.5).fit(X, y)
    assert a.dumps() == b.dumps()


def test_missing_classes_get_mass():
    X = np.eye(3)
    clf = MaxEntClassifier(l2=1.0).fit(X, ["O", "O", "P"])
    p = clf.predict_proba(X)
    assert (p[:, 1] > 0.01).all()
