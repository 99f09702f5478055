"""End-to-end estimator: preprocessing, features, classifier and decoding."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import LABELS, Abstract, Label
from .features import AbstractContext, FeatureDictionary, TokenFeaturizer, extract_features
from .inference import (
    DEFAULT_DELTA, MODES, EmptyProblem, Infeasible, Solution, build_problem, solve,
)
from .maxent import MaxEntClassifier
from .preprocess.pipeline import Candidate, Preprocessor, filter_candidates

log = logging.getLogger(__name__)

MODEL_FORMAT = "rctextract-model"
MODEL_VERSION = 1
ROW_FIELDS = ("id", "patients", "arm1", "arm2", "outcome", "result1", "result2", "status")


class ModeUnsupported(ValueError):
    pass


@dataclass(frozen=True)
class EvidenceRow:
    """One evidence-table row; cells are original text of the chosen heads."""

    id: str
    patients: str = ""
    arm1: str = ""
    arm2: str = ""
    outcome: str = ""
    result1: str = ""
    result2: str = ""
    status: str = "OK"

    def cells(self) -> Tuple[str, ...]:
        return tuple(getattr(self, f) for f in ROW_FIELDS)


def emit_evidence_table(abstract: Abstract, solution: Solution,
                        candidates: Optional[Sequence[Candidate]] = None) -> EvidenceRow:
    """Evidence row for a constrained-mode solution.

    Each cell is ``abstract.text`` sliced at the head token's character span,
    so normalized results show up as written (e.g. ``-4.0 +/-1.7 mmHg``).
    """
    if solution.mode == "zero":
        raise ModeUnsupported("zero-mode solutions have no unique head per label")
    if not solution.feasible or solution.positions is None:
        return EvidenceRow(abstract.id, status="INFEASIBLE")
    if candidates is None:
        candidates = filter_candidates(abstract)
    cells = [abstract.span_text(candidates[z - 1].token.char_span) for z in solution.positions]
    return EvidenceRow(abstract.id, *cells)


def token_labels(abstract: Abstract, candidates: Sequence[Candidate], solution: Solution) -> List[Label]:
    """Spread candidate labels back over all tokens; filtered tokens get ``O``."""
    out = [Label.O] * len(abstract.tokens)
    for c, lab in zip(candidates, solution.labels):
        out[c.token_index] = lab
    return out


def candidate_features(abstract: Abstract, candidates: Sequence[Candidate]) -> List[List[str]]:
    ctx = AbstractContext(abstract)
    return [extract_features(abstract, c.token_index, ctx) for c in candidates]


class EvidenceExtractor(BaseEstimator):
    """Extract evidence-table heads from abstracts.

    ``fit`` trains the classifier on the candidate tokens of annotated
    abstracts; ``decode`` returns the constrained solution for one abstract.

    Parameters
    ----------
    mode : {"zero", "vanilla", "full"}
        Default decoding mode.
    l2, max_iter, tol, solver, class_weight
        Classifier settings, see :class:`~rctextract.maxent.MaxEntClassifier`.
    delta_a, delta_r : float
        Distance penalty weights for full-mode decoding.
    same_sentence : bool
        Strict outcome/result sentence constraint.
    fallback : bool
        Decode infeasible full-mode problems in vanilla mode instead.
    abbreviations, gazetteer, guess_sections
        Preprocessing settings, see :class:`~rctextract.preprocess.Preprocessor`.
    """

    def __init__(self, mode="full", l2=1.0, max_iter=500, tol=1e-6, solver="lbfgs",
                 class_weight=None, delta_a=DEFAULT_DELTA, delta_r=DEFAULT_DELTA,
                 same_sentence=False, fallback=True, abbreviations=None, gazetteer=None,
                 guess_sections=True):
        self.mode = mode
        self.l2 = l2
        self.max_iter = max_iter
        self.tol = tol
        self.solver = solver
        self.class_weight = class_weight
        self.delta_a = delta_a
        self.delta_r = delta_r
        self.same_sentence = same_sentence
        self.fallback = fallback
        self.abbreviations = abbreviations
        self.gazetteer = gazetteer
        self.guess_sections = guess_sections

    def _preprocessor(self) -> Preprocessor:
        return Preprocessor(abbreviations=self.abbreviations, gazetteer=self.gazetteer,
                            guess_sections=self.guess_sections)

    def fit(self, abstracts: Sequence[Abstract], y=None):
        if not abstracts:
            raise ValueError("no training abstracts")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.preprocessor_ = self._preprocessor().fit(abstracts)
        docs = self.preprocessor_.transform(abstracts)
        feats, labels = [], []
        for a in docs:
            cands = filter_candidates(a)
            feats += candidate_features(a, cands)
            labels += [c.token.gold.value for c in cands]
        self.featurizer_ = TokenFeaturizer().fit(feats)
        self.classifier_ = MaxEntClassifier(
            l2=self.l2, max_iter=self.max_iter, tol=self.tol, solver=self.solver,
            class_weight=self.class_weight,
        ).fit(self.featurizer_.transform(feats), labels)
        return self

    def prepare(self, abstract: Abstract) -> Abstract:
        check_is_fitted(self, "classifier_")
        return self.preprocessor_.transform([abstract])[0]

    def candidate_proba(self, abstract: Abstract) -> Tuple[Abstract, List[Candidate], np.ndarray]:
        """Preprocessed abstract, its candidates and their (N, 7) label distributions."""
        doc = self.prepare(abstract)
        cands = filter_candidates(doc)
        if not cands:
            return doc, cands, np.zeros((0, len(LABELS)))
        X = self.featurizer_.transform(candidate_features(doc, cands))
        return doc, cands, self.classifier_.predict_proba(X)

    def decode(self, abstract: Abstract, mode: Optional[str] = None
               ) -> Tuple[Abstract, List[Candidate], Solution]:
        """Solve one abstract; infeasible problems yield ``Solution.infeasible``."""
        mode = mode or self.mode
        doc, cands, proba = self.candidate_proba(abstract)
        try:
            problem = build_problem(doc, proba, cands, self.delta_a, self.delta_r, self.same_sentence)
        except EmptyProblem:
            return doc, cands, Solution.infeasible(mode, 0)
        try:
            return doc, cands, solve(problem, mode)
        except Infeasible:
            if mode == "full" and self.fallback:
                log.warning("%s: full decoding infeasible, falling back to vanilla", abstract.id)
                try:
                    return doc, cands, solve(problem, "vanilla")
                except Infeasible:
                    pass
            log.warning("%s: %s decoding infeasible", abstract.id, mode)
            return doc, cands, Solution.infeasible(mode, len(cands))

    def predict(self, abstracts: Sequence[Abstract], mode: Optional[str] = None) -> List[List[Label]]:
        """Per-token labels for each abstract (filtered tokens are ``O``)."""
        out = []
        for a in abstracts:
            doc, cands, sol = self.decode(a, mode)
            out.append(token_labels(doc, cands, sol))
        return out

    def evidence_rows(self, abstracts: Sequence[Abstract], mode: Optional[str] = None) -> List[EvidenceRow]:
        rows = []
        for a in abstracts:
            doc, cands, sol = self.decode(a, mode)
            rows.append(emit_evidence_table(doc, sol, cands))
        return rows

    # -- persistence -------------------------------------------------------

    def to_dict(self) -> dict:
        check_is_fitted(self, "classifier_")
        features = self.featurizer_.dictionary_.features()
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "params": self.get_params(),
            "classifier": self.classifier_.to_dict(features),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())
            fh.write("\n")

    @classmethod
    def from_dict(cls, d: dict) -> "EvidenceExtractor":
        if d.get("format") != MODEL_FORMAT or d.get("version") != MODEL_VERSION:
            raise ValueError("not a version 1 extractor model")
        est = cls(**d["params"])
        est.preprocessor_ = est._preprocessor().fit([])
        clf = MaxEntClassifier.from_dict(d["classifier"])
        fz = TokenFeaturizer()
        fz.dictionary_ = FeatureDictionary(d["classifier"]["features"]).freeze()
        est.featurizer_ = fz
        est.classifier_ = clf
        return est

    @classmethod
    def load(cls, path) -> "EvidenceExtractor":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))
