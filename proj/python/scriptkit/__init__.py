"""Hangul subcharacter tokenization, morphological oracle and SCRIPT-style composition."""

import json

from ._core import (
    AlignmentError,
    ConfigError,
    Error,
    IndexError,
    InvalidBlockError,
    MalformedSequenceError,
    NotApplicableError,
    ParseError,
    ScriptModel,
    ShapeError,
    SubcharSequence,
    SubwordVocab,
    classify_mod,
    cohesion,
    compose,
    cosine,
    decompose,
    detokenize,
    gradcheck,
    oracle_align,
    pair_similarity,
    pca,
    slot_width,
    tokenize,
    train,
)


def oracle_stats(records, top_k=10):
    """Counters for (surface, lemma_units) records, as a dict."""
    from ._core import oracle_stats_json

    return json.loads(oracle_stats_json(list(records), top_k))


__all__ = [
    "AlignmentError",
    "ConfigError",
    "Error",
    "IndexError",
    "InvalidBlockError",
    "MalformedSequenceError",
    "NotApplicableError",
    "ParseError",
    "ScriptModel",
    "ShapeError",
    "SubcharSequence",
    "SubwordVocab",
    "classify_mod",
    "cohesion",
    "compose",
    "cosine",
    "decompose",
    "detokenize",
    "gradcheck",
    "oracle_align",
    "oracle_stats",
    "pair_similarity",
    "pca",
    "slot_width",
    "tokenize",
    "train",
]
