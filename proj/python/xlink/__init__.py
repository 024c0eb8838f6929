"""Cross-network user profile matching.

Thin re-export of the native ``_core`` module. Feature rows are lists of 27
floats in canonical order, with ``nan`` marking a missing value.
"""

import json as _json

from ._core import (
    ArgumentError,
    EncodingError,
    EvaluationError,
    FeatureExtractor,
    GenerationError,
    Model,
    ParseError,
    TrainingError,
    XlinkError,
    ablate,
    anova_f,
    build_folds,
    confusion_metrics,
    cosine_tf,
    cosine_tfidf,
    damerau_levenshtein_distance,
    damerau_levenshtein_sim,
    difference_sim,
    evaluate,
    feature_names,
    jaccard_tokens,
    jaro_winkler_sim,
    lcs_sim,
    levenshtein_distance,
    ncd_sim,
    ngram_sim,
    normalize_text,
    roc_auc,
    soundex,
    soundex_sim,
    vmn_sim,
)
from ._core import synth as _synth


def synth(out_dir, **config):
    """Writes a synthetic corpus pair to ``out_dir``; returns the positive count."""
    return _synth(str(out_dir), _json.dumps(config))


__all__ = [name for name in dir() if not name.startswith("_")]
