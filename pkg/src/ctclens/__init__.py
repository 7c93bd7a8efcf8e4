"""Layer-wise CTC phoneme decoding diagnostics.

Decode phoneme hypotheses from per-layer logits, align them to gold
transcriptions, quantify per-layer error profiles, and detect regressive
errors where deeper layers overwrite correct intermediate predictions.
"""

from .align import (
    DELETION,
    HIT,
    INSERTION,
    SUBSTITUTION,
    AlignmentOutcome,
    ErrorCounts,
    align,
    classify_replace,
)
from .bundle import (
    BundleFormatError,
    LayerLogitBundle,
    PhonemeSequence,
    load_corpus,
    read_bundle,
    retokenize,
    tokenize,
    write_bundle,
)
from .decoder import FramePath, decode_all_layers, greedy_decode
from .metrics import (
    CorpusTrend,
    LayerReport,
    confusion_matrices,
    per_improvement,
    score,
    trend,
)
from .regressions import RegressionEvent, RegressionSummary, detect, summarize
from .report import emit_comparison, emit_confusion, emit_layer_table, emit_sidebyside
from .synth import InjectionPlan, derive_vocab, generate, load_plan_file

__version__ = "0.1.0"

__all__ = [
    "AlignmentOutcome",
    "BundleFormatError",
    "CorpusTrend",
    "DELETION",
    "ErrorCounts",
    "FramePath",
    "HIT",
    "INSERTION",
    "InjectionPlan",
    "LayerLogitBundle",
    "LayerReport",
    "PhonemeSequence",
    "RegressionEvent",
    "RegressionSummary",
    "SUBSTITUTION",
    "align",
    "classify_replace",
    "confusion_matrices",
    "decode_all_layers",
    "derive_vocab",
    "detect",
    "emit_comparison",
    "emit_confusion",
    "emit_layer_table",
    "emit_sidebyside",
    "generate",
    "greedy_decode",
    "load_corpus",
    "load_plan_file",
    "per_improvement",
    "read_bundle",
    "retokenize",
    "score",
    "summarize",
    "tokenize",
    "trend",
    "write_bundle",
]
