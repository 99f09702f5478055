"""Sparse indicator features for candidate tokens."""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .corpus import Abstract
from .preprocess.normalize import as_tag
from .preprocess.pipeline import normalize_words

NONE = "none"
WINDOW = 2


def word_form(word: str) -> str:
    """Lowercase, except normalization tags which stay verbatim."""
    return word if as_tag(word) is not None else word.lower()


def position_bin(i: int, n: int) -> int:
    """Relative position ``i/(n-1)`` quantized to 0..9."""
    if n <= 1:
        return 0
    return min(9, int(10 * i / (n - 1)))


class AbstractContext:
    """Per-abstract lookups shared by all candidates of one abstract."""

    def __init__(self, abstract: Abstract):
        self.abstract = abstract
        self.title_words: Set[str] = {
            word_form(t.text) for t in normalize_words(abstract.title, dict(abstract.abbrev_map))
        }
        self.sentence_bounds: Dict[int, tuple] = {}
        for i, t in enumerate(abstract.tokens):
            lo, hi = self.sentence_bounds.get(t.sentence_id, (i, i))
            self.sentence_bounds[t.sentence_id] = (min(lo, i), max(hi, i))


def extract_features(abstract: Abstract, token_index: int,
                     context: Optional[AbstractContext] = None) -> List[str]:
    """Namespaced feature strings for one token of a preprocessed abstract.

    Window slots that fall outside the token's sentence take the value
    ``none``. The result may contain duplicates (chunk bag-of-words).
    """
    ctx = context or AbstractContext(abstract)
    toks = abstract.tokens
    tok = toks[token_index]
    lo, hi = ctx.sentence_bounds[tok.sentence_id]
    word = word_form(tok.normalized)

    def at(k: int):
        j = token_index + k
        return toks[j] if lo <= j <= hi else None

    prev = at(-1)
    feats = [
        f"w={word}",
        f"bi={word_form(prev.normalized) if prev else NONE}|{word}",
    ]
    for k in range(-WINDOW, WINDOW + 1):
        t = at(k)
        feats.append(f"pos[{k}]={t.pos if t else NONE}")
    sem = tok.semantic_class
    in_title = "T" if word in ctx.title_words else "F"
    sec = tok.section.value
    feats += [
        f"sem={sem}",
        f"intitle={in_title}",
        f"inbr={'T' if tok.in_brackets else 'F'}",
        f"pib={position_bin(token_index - lo, hi - lo + 1)}",
        f"spos={min(tok.sentence_index, 9)}",
        f"head={tok.paragraph_heading.upper() or NONE}",
        f"sec={sec}",
        f"sem&sec={sem}&{sec}",
        f"intitle&sem={in_title}&{sem}",
    ]
    if 0 <= tok.chunk_id < len(abstract.chunks):
        c = abstract.chunks[tok.chunk_id]
        feats.append(f"ctype={c.chunk_type.value}")
        feats += [f"cbow={word_form(toks[j].normalized)}" for j in range(c.start, c.end)]
    else:
        feats.append(f"ctype={NONE}")
    return feats


class FeatureDictionary:
    """Injective feature-string -> id map, append-only until frozen."""

    def __init__(self, features: Iterable[str] = ()):
        self._ids: Dict[str, int] = {}
        self.frozen = False
        for f in features:
            self.add(f)

    def add(self, feature: str) -> int:
        if feature in self._ids:
            return self._ids[feature]
        if self.frozen:
            raise RuntimeError("dictionary is frozen")
        self._ids[feature] = len(self._ids)
        return self._ids[feature]

    def get(self, feature: str) -> Optional[int]:
        return self._ids.get(feature)

    def freeze(self) -> "FeatureDictionary":
        self.frozen = True
        return self

    def features(self) -> List[str]:
        return list(self._ids)

    def __len__(self) -> int:
        return len(self._ids)

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureDictionary) and self.features() == other.features()


def fit_dictionary(feature_lists: Iterable[Iterable[str]]) -> FeatureDictionary:
    """Ids in first-seen order; frozen on return."""
    d = FeatureDictionary()
    for feats in feature_lists:
        for f in feats:
            d.add(f)
    return d.freeze()


def vectorize(features: Iterable[str], dictionary: FeatureDictionary) -> List[int]:
    """Sorted unique ids of the known features; unknown features are dropped."""
    if not dictionary.frozen:
        raise RuntimeError("dictionary must be frozen before vectorizing")
    ids = {dictionary.get(f) for f in features}
    ids.discard(None)
    return sorted(ids)


def to_matrix(rows: Sequence[Sequence[int]], n_features: int) -> sp.csr_matrix:
    indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(r) for r in rows])
    indices = np.fromiter((i for r in rows for i in r), dtype=np.int64, count=int(indptr[-1]))
    data = np.ones(len(indices), dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(len(rows), n_features))


class TokenFeaturizer(BaseEstimator, TransformerMixin):
    """Turns lists of feature strings into a binary CSR matrix.

    ``fit`` builds the :class:`FeatureDictionary`; ``transform`` drops
    features never seen during ``fit``.
    """

    def fit(self, X, y=None):
        self.dictionary_ = fit_dictionary(X)
        return self

    def transform(self, X):
        check_is_fitted(self, "dictionary_")
        return to_matrix([vectorize(f, self.dictionary_) for f in X], len(self.dictionary_))

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "dictionary_")
        return np.asarray(self.dictionary_.features(), dtype=object)
