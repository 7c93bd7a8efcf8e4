"""Phoneme error rate and error-profile aggregation.

PER = (substitutions + deletions + insertions) / reference length * 100, with
the integer error sum formed before the single division.  PER can exceed 100%
for insertion-heavy hypotheses and is deliberately not clamped: overgeneration
is one of the behaviours this toolkit exists to surface.

Corpus-level PER comes in two flavours because neither is canonical:
``macro`` (unweighted mean of per-utterance PERs) and ``micro`` (total errors
over total reference tokens).  Both are always computed.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .align import DELETION, INSERTION, SUBSTITUTION, AlignmentOutcome, ErrorCounts, align

DELETION_MARK = "DEL"


@dataclass(frozen=True)
class LayerReport:
    """PER plus the full error profile for one utterance at one layer."""

    utterance_id: str
    layer_index: int
    per: float
    counts: ErrorCounts
    substitution_pairs: Counter = field(default_factory=Counter)
    deleted_tokens: Counter = field(default_factory=Counter)
    inserted_tokens: Counter = field(default_factory=Counter)

    @property
    def ref_length(self) -> int:
        return self.counts.hits + self.counts.substitutions + self.counts.deletions


class TrendPoint(NamedTuple):
    mean_per_macro: float
    mean_per_micro: float
    counts: ErrorCounts


@dataclass(frozen=True)
class CorpusTrend:
    """Per-layer corpus aggregates, keyed by layer index."""

    per_layer: dict[int, TrendPoint]
    utterances: int

    def layers_descending(self) -> list[int]:
        return sorted(self.per_layer, reverse=True)


def score_alignment(outcome: AlignmentOutcome, utterance_id: str, layer_index: int) -> LayerReport:
    """Turn an existing alignment into a LayerReport (reference non-empty)."""
    n_ref = len(outcome.ref_tokens)
    if n_ref == 0:
        raise ValueError(f"{utterance_id}: empty reference, PER is undefined")
    counts = outcome.counts
    subs: Counter = Counter()
    dels: Counter = Counter()
    ins: Counter = Counter()
    for tok, (kind, counterpart) in zip(outcome.ref_tokens, outcome.ref_labels):
        if kind == SUBSTITUTION:
            subs[(tok, counterpart)] += 1
        elif kind == DELETION:
            dels[tok] += 1
    for tok, (kind, _) in zip(outcome.hyp_tokens, outcome.hyp_labels):
        if kind == INSERTION:
            ins[tok] += 1
    errors = counts.substitutions + counts.deletions + counts.insertions
    return LayerReport(
        utterance_id=utterance_id,
        layer_index=layer_index,
        per=errors * 100 / n_ref,
        counts=counts,
        substitution_pairs=subs,
        deleted_tokens=dels,
        inserted_tokens=ins,
    )


def score(
    ref: Sequence[str],
    hyp: Sequence[str],
    utterance_id: str,
    layer_index: int,
    mode: str = "ratcliff",
) -> LayerReport:
    """Align ``hyp`` to ``ref`` and report PER and error multisets."""
    if len(ref) == 0:
        raise ValueError(f"{utterance_id}: empty reference, PER is undefined")
    return score_alignment(align(ref, hyp, mode=mode), utterance_id, layer_index)


def per_improvement(report_a: LayerReport, report_b: LayerReport) -> float:
    """Relative PER improvement (percent) going from report_a to report_b."""
    if report_a.utterance_id != report_b.utterance_id:
        raise ValueError(
            f"utterance mismatch: {report_a.utterance_id!r} vs {report_b.utterance_id!r}"
        )
    if report_a.per == 0:
        raise ValueError(f"{report_a.utterance_id}: baseline PER is zero, improvement undefined")
    return (report_a.per - report_b.per) / report_a.per * 100


def confusion_matrices(reports: Iterable[LayerReport]) -> dict[int, tuple[Counter, Counter]]:
    """Aggregate substitution and deletion multisets across utterances.

    Returns layer_index -> (substitution counter keyed by (ref, hyp) pair,
    deletion counter keyed by ref token).
    """
    out: dict[int, tuple[Counter, Counter]] = {}
    for report in reports:
        subs, dels = out.setdefault(report.layer_index, (Counter(), Counter()))
        subs.update(report.substitution_pairs)
        dels.update(report.deleted_tokens)
    return out


def trend(reports: Sequence[LayerReport], allow_ragged: bool = False) -> CorpusTrend:
    """Corpus trend across layers: mean PERs and summed error counts.

    Every utterance must cover the same layer set unless ``allow_ragged`` is
    set, in which case each layer aggregates whichever utterances have it.
    """
    by_utterance: dict[str, set[int]] = {}
    for report in reports:
        by_utterance.setdefault(report.utterance_id, set()).add(report.layer_index)
    if not allow_ragged and len({frozenset(v) for v in by_utterance.values()}) > 1:
        raise ValueError(
            "ragged layer coverage across utterances: "
            + ", ".join(f"{u}:{sorted(v)}" for u, v in sorted(by_utterance.items()))
        )

    per_layer: dict[int, TrendPoint] = {}
    for layer in sorted({r.layer_index for r in reports}):
        layer_reports = [r for r in reports if r.layer_index == layer]
        totals = ErrorCounts(
            sum(r.counts.hits for r in layer_reports),
            sum(r.counts.substitutions for r in layer_reports),
            sum(r.counts.deletions for r in layer_reports),
            sum(r.counts.insertions for r in layer_reports),
        )
        total_ref = totals.hits + totals.substitutions + totals.deletions
        total_errors = totals.substitutions + totals.deletions + totals.insertions
        per_layer[layer] = TrendPoint(
            mean_per_macro=sum(r.per for r in layer_reports) / len(layer_reports),
            mean_per_micro=total_errors * 100 / total_ref,
            counts=totals,
        )
    return CorpusTrend(per_layer=per_layer, utterances=len(by_utterance))
