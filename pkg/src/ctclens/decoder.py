"""Greedy CTC decoding of per-layer logit matrices.

Decoding is the textbook best-path collapse: take the argmax token per frame,
merge consecutive repeats, drop blanks.  No softmax is applied (argmax is
invariant to per-frame monotone transforms) and no beam search or language
model is involved.  Everything here is a pure function over immutable input;
layers and utterances can be decoded in parallel freely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundle import LayerLogitBundle, PhonemeSequence


@dataclass(frozen=True)
class FramePath:
    """Frame-level provenance of a greedy decode.

    ``frame_argmax`` holds the winning token id per frame.  ``emitted_spans``
    lists one ``(token_id, start_frame, end_frame)`` triple per emitted token,
    end-exclusive: the run of frames whose argmax produced that token.  Spans
    never contain the blank id, never overlap, and two adjacent spans carry
    the same token id only when at least one other frame separates them.
    """

    frame_argmax: tuple[int, ...]
    emitted_spans: tuple[tuple[int, int, int], ...]


def greedy_decode(logits: np.ndarray, blank_id: int) -> tuple[list[int], FramePath]:
    """Collapse a T-by-V logit matrix into emitted token ids plus provenance.

    Argmax ties go to the lowest token id.  An empty matrix (T == 0) decodes
    to an empty sequence.
    """
    m = np.asarray(logits)
    if m.ndim != 2:
        raise ValueError(f"logits must be 2-D, got shape {m.shape}")
    frames, vocab_size = m.shape
    if vocab_size < 2:
        raise ValueError(f"vocabulary must have at least 2 entries, got {vocab_size}")
    if not 0 <= blank_id < vocab_size:
        raise ValueError(f"blank_id {blank_id} out of range for vocabulary of {vocab_size}")

    path = m.argmax(axis=1).tolist() if frames else []
    token_ids: list[int] = []
    spans: list[tuple[int, int, int]] = []
    start = 0
    for frame in range(1, frames + 1):
        if frame < frames and path[frame] == path[start]:
            continue
        if path[start] != blank_id:
            token_ids.append(path[start])
            spans.append((path[start], start, frame))
        start = frame
    return token_ids, FramePath(tuple(path), tuple(spans))


def decode_all_layers(bundle: LayerLogitBundle) -> dict[int, tuple[PhonemeSequence, FramePath]]:
    """Run the greedy decode on every layer of a bundle.

    Token ids are rendered to token strings through the bundle vocabulary, so
    the result pairs each layer index with a hypothesis ``PhonemeSequence``.
    """
    decoded: dict[int, tuple[PhonemeSequence, FramePath]] = {}
    for index, logits in bundle.layers:
        token_ids, path = greedy_decode(logits, bundle.blank_id)
        hypothesis = PhonemeSequence(tuple(bundle.vocab[tid] for tid in token_ids))
        decoded[index] = (hypothesis, path)
    return decoded
