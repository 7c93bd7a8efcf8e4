"""Regressive-error detection across layers.

A regression is a reference position that some layer gets right (a hit) while
a deeper layer turns it into a substitution or deletion.  Positions are keyed
on the reference index: hypothesis indices are not comparable across layers
because hypothesis lengths differ, while the reference is fixed.

Two reporting modes:

``default``
    Only degradations at the deepest layer count, and each reference position
    is reported at most once, sourced from the shallowest layer where it is a
    hit.  A position that recovers by the deepest layer produces nothing.

``exhaustive``
    Every ordered layer pair (shallower, deeper) with a hit-to-error flip
    produces its own event, so one position can appear several times.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .align import DELETION, HIT, SUBSTITUTION, AlignmentOutcome

DETECT_MODES = ("default", "exhaustive")


@dataclass(frozen=True)
class RegressionEvent:
    """One hit-to-error flip between two layers at one reference position."""

    utterance_id: str
    ref_index: int
    ref_token: str
    source_layer: int
    target_layer: int
    kind: str  # substitution or deletion
    replacement: str | None = None  # hypothesis token, substitutions only

    def __post_init__(self) -> None:
        if self.target_layer <= self.source_layer:
            raise ValueError(
                f"target layer {self.target_layer} must be deeper than source {self.source_layer}"
            )
        if self.kind not in (SUBSTITUTION, DELETION):
            raise ValueError(f"degradation kind must be substitution or deletion, got {self.kind!r}")


@dataclass(frozen=True)
class RegressionSummary:
    total: int
    by_kind: dict[str, int]
    by_token: list[tuple[str, int]]  # descending count, token as tie-break


def detect(
    per_layer_alignments: Mapping[int, AlignmentOutcome],
    utterance_id: str,
    mode: str = "default",
    source_layers: Iterable[int] | None = None,
) -> list[RegressionEvent]:
    """Find hit-to-error flips across the given per-layer alignments.

    All alignments must share the reference sequence.  ``source_layers``
    optionally restricts which layers may act as the correct side of a flip;
    by default every layer shallower than the degraded one qualifies.
    """
    if mode not in DETECT_MODES:
        raise ValueError(f"unknown detection mode {mode!r}; expected one of {DETECT_MODES}")
    if not per_layer_alignments:
        return []
    layers = sorted(per_layer_alignments)
    reference = per_layer_alignments[layers[0]].ref_tokens
    for layer in layers:
        if per_layer_alignments[layer].ref_tokens != reference:
            raise ValueError(
                f"{utterance_id}: layer {layer} was aligned against a different reference"
            )
    allowed_sources = set(layers) if source_layers is None else set(source_layers)

    def degradation(layer: int, ref_index: int) -> tuple[str, str | None] | None:
        kind, counterpart = per_layer_alignments[layer].ref_labels[ref_index]
        if kind in (SUBSTITUTION, DELETION):
            return kind, counterpart
        return None

    events: list[RegressionEvent] = []
    if mode == "default":
        target = layers[-1]
        for ref_index, token in enumerate(reference):
            degraded = degradation(target, ref_index)
            if degraded is None:
                continue
            for source in layers[:-1]:
                if source not in allowed_sources:
                    continue
                if per_layer_alignments[source].ref_labels[ref_index][0] == HIT:
                    kind, counterpart = degraded
                    events.append(
                        RegressionEvent(
                            utterance_id=utterance_id,
                            ref_index=ref_index,
                            ref_token=token,
                            source_layer=source,
                            target_layer=target,
                            kind=kind,
                            replacement=counterpart,
                        )
                    )
                    break  # one event per position, shallowest hit wins
    else:
        for pos_source, source in enumerate(layers):
            if source not in allowed_sources:
                continue
            for target in layers[pos_source + 1 :]:
                for ref_index, token in enumerate(reference):
                    if per_layer_alignments[source].ref_labels[ref_index][0] != HIT:
                        continue
                    degraded = degradation(target, ref_index)
                    if degraded is None:
                        continue
                    kind, counterpart = degraded
                    events.append(
                        RegressionEvent(
                            utterance_id=utterance_id,
                            ref_index=ref_index,
                            ref_token=token,
                            source_layer=source,
                            target_layer=target,
                            kind=kind,
                            replacement=counterpart,
                        )
                    )
    return events


def summarize(events: Iterable[RegressionEvent]) -> RegressionSummary:
    """Tally events by reference token and by degradation kind."""
    events = list(events)
    by_kind = Counter(event.kind for event in events)
    by_token = Counter(event.ref_token for event in events)
    ranked = sorted(by_token.items(), key=lambda item: (-item[1], item[0]))
    return RegressionSummary(
        total=len(events),
        by_kind={SUBSTITUTION: by_kind.get(SUBSTITUTION, 0), DELETION: by_kind.get(DELETION, 0)},
        by_token=ranked,
    )
