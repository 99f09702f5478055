import logging

import numpy as np
import pytest
from sklearn.base import clone

from rctextract.corpus import TARGET_LABELS, Label, parse_annotated
from rctextract.extractor import (
    EvidenceExtractor, EvidenceRow, ModeUnsupported, emit_evidence_table, token_labels,
)
from rctextract.inference import Solution, solve
from rctextract.preprocess import filter_candidates, preprocess


def gold_solution(doc, cands, mode="full"):
    pos = []
    for lab in TARGET_LABELS:
        pos.append(next(c.index for c in cands if c.token.gold is lab))
    labels = [Label.O] * len(cands)
    for lab, z in zip(TARGET_LABELS, pos):
        labels[z - 1] = lab
    return Solution(mode, tuple(labels), tuple(pos), 0.0, True)


def test_table1_row(table1):
    doc = preprocess(table1)
    cands = filter_candidates(doc)
    row = emit_evidence_table(doc, gold_solution(doc, cands), cands)
    assert row.cells()[1:7] == ("Patients", "Tafluprost", "Placebo", "changes",
                                "-4.0 +/-1.7 mmHg", "-1.4 +/-1.8 mmHg")
    assert row.status == "OK" and row.id == "table1"
    assert emit_evidence_table(doc, gold_solution(doc, cands)) == row
    assert all(c in doc.text for c in row.cells()[1:7])


def test_infeasible_row(table1):
    row = emit_evidence_table(table1, Solution.infeasible("full", 3))
    assert row == EvidenceRow("table1", status="INFEASIBLE")
    assert row.cells()[1:7] == ("",) * 6


def test_zero_mode_unsupported(table1):
    with pytest.raises(ModeUnsupported):
        emit_evidence_table(table1, Solution("zero", (Label.O,), None, 0.0))


def test_token_labels_restore_filtered(table1):
    doc = preprocess(table1)
    cands = filter_candidates(doc)
    labels = token_labels(doc, cands, gold_solution(doc, cands))
    assert labels == doc.labels


def test_estimator_params():
    est = EvidenceExtractor(l2=0.5, mode="vanilla")
    assert est.get_params()["l2"] == 0.5
    c = clone(est)
    assert c.get_params() == est.get_params() and c is not est


def test_fit_predict(fitted, synth_small):
    preds = fitted.predict(synth_small[:5])
    assert [len(p) for p in preds] == [len(preprocess(a).tokens) for a in synth_small[:5]]
    for p in fitted.predict(synth_small[:5], "full"):
        for lab in TARGET_LABELS:
            assert p.count(lab) == 1
    rows = fitted.evidence_rows(synth_small[:5])
    assert all(r.status == "OK" for r in rows)
    for a, r in zip(synth_small, rows):
        assert all(c in a.text for c in r.cells()[1:7])


def test_table1_with_synthetic_model(fitted, table1):
    doc, cands, sol = fitted.decode(table1, "full")
    row = emit_evidence_table(doc, sol, cands)
    assert row.result1 == "-4.0 +/-1.7 mmHg" and row.result2 == "-1.4 +/-1.8 mmHg"


def test_save_load_identical(fitted, synth_small, tmp_path):
    path = tmp_path / "m.json"
    fitted.save(path)
    back = EvidenceExtractor.load(path)
    assert back.dumps() == fitted.dumps()
    a = synth_small[0]
    _, _, p1 = fitted.candidate_proba(a)
    _, _, p2 = back.candidate_proba(a)
    assert np.array_equal(p1, p2)
    assert back.evidence_rows(synth_small[:3]) == fitted.evidence_rows(synth_small[:3])


def test_refit_deterministic(synth_small, fitted):
    assert EvidenceExtractor(max_iter=200).fit(synth_small).dumps() == fitted.dumps()


def test_fallback_to_vanilla(fitted, caplog):
    a = parse_annotated("METHODS: Patients received timolol or placebo for 4 weeks.\n"
                        "RESULTS: Pressure fell in both groups and was well tolerated.", "nores")
    with caplog.at_level(logging.WARNING):
        doc, cands, sol = fitted.decode(a, "full")
    assert sol.mode == "vanilla" and sol.feasible
    assert "falling back to vanilla" in caplog.text
    strict = clone(fitted).set_params(fallback=False)
    strict.__dict__.update({k: v for k, v in fitted.__dict__.items() if k.endswith("_")})
    _, _, sol2 = strict.decode(a, "full")
    assert not sol2.feasible
    assert emit_evidence_table(doc, sol2, cands).status == "INFEASIBLE"


def test_unfitted_raises(table1):
    from sklearn.exceptions import NotFittedError
    with pytest.raises(NotFittedError):
        EvidenceExtractor().decode(table1)


def test_solution_consistent_with_solver(fitted, synth_small):
    from rctextract.inference import build_problem
    a = synth_small[3]
    doc, cands, proba = fitted.candidate_proba(a)
    pr = build_problem(doc, proba, cands)
    assert fitted.decode(a, "full")[2] == solve(pr, "full")
