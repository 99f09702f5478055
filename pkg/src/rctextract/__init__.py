"""Evidence-table extraction from randomized clinical trial abstracts.

A maximum-entropy token classifier scores candidate head tokens; exact
constrained inference then picks one patient group, two arms, an outcome
and two results per abstract.
"""
from .corpus import (
    LABELS, Abstract, Label, SectionClass, Token, parse_annotated, read_corpus,
    section_class, to_annotated, write_corpus,
)
from .extractor import EvidenceExtractor, EvidenceRow, ModeUnsupported, emit_evidence_table
from .inference import LabelingProblem, Solution, brute_force, build_problem, objective, solve
from .maxent import MaxEntClassifier

__version__ = "0.1.0"

__all__ = [
    "Abstract", "EvidenceExtractor", "EvidenceRow", "LABELS", "Label", "LabelingProblem",
    "MaxEntClassifier", "ModeUnsupported", "SectionClass", "Solution", "Token", "brute_force",
    "build_problem", "emit_evidence_table", "objective", "parse_annotated", "read_corpus",
    "section_class", "solve", "to_annotated", "write_corpus",
]
