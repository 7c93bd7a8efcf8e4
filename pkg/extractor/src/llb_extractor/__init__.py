"""Per-layer logit extraction from CTC phoneme recognizers into layer logit
bundles (the on-disk contract of the analysis toolkit)."""

from .audio import load_waveform
from .bundles import write_bundle
from .probe import (
    DEFAULT_MODEL,
    Recognizer,
    layer_logits,
    load_recognizer,
    native_transcription,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MODEL",
    "Recognizer",
    "layer_logits",
    "load_recognizer",
    "load_waveform",
    "native_transcription",
    "write_bundle",
]
