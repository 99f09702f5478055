"""Sentence splitting, abbreviation expansion, numeric normalization, chunk
semantic classes, candidate filtering and section guessing."""
from .abbrev import expand_text, expand_tokens, guess_abbreviations, load_dictionary
from .normalize import (
    NON_TAG_TYPE, NormTag, NormToken, denormalize, norm_type, normalize_sentence,
    normalize_text, normalize_tokens,
)
from .pipeline import (
    POS_BLACKLIST, Candidate, Preprocessor, assign_sections_unstructured,
    filter_candidates, normalize_words, preprocess, section_blocks,
)
from .semantics import Gazetteer, SemanticClass, classify_chunk, propagate_semantics
from .tagger import chunk, pos_tag
from ..text import split_sentences

__all__ = [
    "Candidate", "Gazetteer", "NON_TAG_TYPE", "NormTag", "NormToken", "POS_BLACKLIST",
    "Preprocessor", "SemanticClass", "assign_sections_unstructured", "chunk",
    "classify_chunk", "denormalize", "expand_text", "expand_tokens", "filter_candidates",
    "guess_abbreviations", "load_dictionary", "norm_type", "normalize_sentence",
    "normalize_text", "normalize_tokens", "normalize_words", "pos_tag", "preprocess",
    "propagate_semantics", "section_blocks", "split_sentences",
]
