"""Serialization of trends, comparisons, confusion tables, and side-by-side
layer transcriptions.

Emitters are pure and deterministic: identical inputs produce byte-identical
documents.  CSV output is RFC-4180 (UTF-8, comma, header row, CRLF line ends)
with two-decimal rounding for rate columns; JSON keeps full precision.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from typing import Mapping, Sequence

from .bundle import LayerLogitBundle, PhonemeSequence
from .decoder import FramePath
from .metrics import DELETION_MARK, CorpusTrend, LayerReport, per_improvement

FORMATS = ("csv", "json")

LAYER_TABLE_COLUMNS = ("layer", "mean_per_macro", "mean_per_micro", "hits", "subs", "dels", "ins")
COMPARISON_COLUMNS = ("utterance", "per_a", "per_b", "improvement")
CONFUSION_COLUMNS = ("layer", "ref_token", "hyp_token", "count")


def _check_format(fmt: str) -> None:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _csv_document(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json_document(rows: Sequence[Mapping]) -> str:
    return json.dumps(list(rows), ensure_ascii=False, indent=2) + "\n"


def emit_layer_table(trend: CorpusTrend, fmt: str = "csv") -> str:
    """One row per layer, deepest first: both corpus PER flavours plus totals."""
    _check_format(fmt)
    if not trend.per_layer:
        raise ValueError("empty trend: nothing to tabulate")
    rows = []
    for layer in trend.layers_descending():
        point = trend.per_layer[layer]
        rows.append(
            {
                "layer": layer,
                "mean_per_macro": point.mean_per_macro,
                "mean_per_micro": point.mean_per_micro,
                "hits": point.counts.hits,
                "subs": point.counts.substitutions,
                "dels": point.counts.deletions,
                "ins": point.counts.insertions,
            }
        )
    if fmt == "json":
        return _json_document(rows)
    return _csv_document(
        LAYER_TABLE_COLUMNS,
        [
            (
                r["layer"],
                f"{r['mean_per_macro']:.2f}",
                f"{r['mean_per_micro']:.2f}",
                r["hits"],
                r["subs"],
                r["dels"],
                r["ins"],
            )
            for r in rows
        ],
    )


def emit_comparison(
    reports_a: Sequence[LayerReport],
    reports_b: Sequence[LayerReport],
    top_k: int | None = None,
    fmt: str = "csv",
) -> str:
    """Per-utterance PER comparison between two layers, best improvement first.

    ``reports_a`` is the baseline.  Rows are sorted by relative improvement
    descending (ties by utterance id) and truncated to ``top_k``.  When the
    baseline PER is zero the relative improvement is undefined: such rows get
    a null improvement (empty CSV cell) and sort last, except that a 0 -> 0
    row counts as zero improvement.
    """
    _check_format(fmt)
    a_by_utt = {r.utterance_id: r for r in reports_a}
    b_by_utt = {r.utterance_id: r for r in reports_b}
    if a_by_utt.keys() != b_by_utt.keys():
        only_a = sorted(a_by_utt.keys() - b_by_utt.keys())
        only_b = sorted(b_by_utt.keys() - a_by_utt.keys())
        raise ValueError(f"utterance sets differ: only in baseline {only_a}, only in other {only_b}")

    rows = []
    for utterance_id in sorted(a_by_utt):
        a, b = a_by_utt[utterance_id], b_by_utt[utterance_id]
        if a.per > 0:
            improvement: float | None = per_improvement(a, b)
        elif b.per == 0:
            improvement = 0.0
        else:
            improvement = None
        rows.append({"utterance": utterance_id, "per_a": a.per, "per_b": b.per, "improvement": improvement})
    rows.sort(
        key=lambda r: (
            -(r["improvement"] if r["improvement"] is not None else float("-inf")),
            r["utterance"],
        )
    )
    if top_k is not None:
        rows = rows[:top_k]
    if fmt == "json":
        return _json_document(rows)
    return _csv_document(
        COMPARISON_COLUMNS,
        [
            (
                r["utterance"],
                f"{r['per_a']:.2f}",
                f"{r['per_b']:.2f}",
                "" if r["improvement"] is None else f"{r['improvement']:.2f}",
            )
            for r in rows
        ],
    )


def emit_confusion(matrices: Mapping[int, tuple[Counter, Counter]], fmt: str = "csv") -> str:
    """Long-format substitution/deletion counts; zero cells are omitted.

    One row per (layer, ref token, hyp token) substitution cell plus one row
    per deleted ref token with the hyp column set to the ``DEL`` marker.
    Layers are emitted deepest first.
    """
    _check_format(fmt)
    rows = []
    for layer in sorted(matrices, reverse=True):
        substitutions, deletions = matrices[layer]
        cells = [
            {"layer": layer, "ref_token": ref, "hyp_token": hyp, "count": count}
            for (ref, hyp), count in substitutions.items()
            if count
        ]
        cells.extend(
            {"layer": layer, "ref_token": ref, "hyp_token": DELETION_MARK, "count": count}
            for ref, count in deletions.items()
            if count
        )
        cells.sort(key=lambda c: (c["ref_token"], c["hyp_token"]))
        rows.extend(cells)
    if fmt == "json":
        return _json_document(rows)
    return _csv_document(
        CONFUSION_COLUMNS,
        [(r["layer"], r["ref_token"], r["hyp_token"], r["count"]) for r in rows],
    )


def emit_sidebyside(
    bundle: LayerLogitBundle,
    decoded: Mapping[int, tuple[PhonemeSequence, FramePath]],
    fmt: str = "markdown",
) -> str:
    """Markdown table of layer hypotheses (deepest first) over the reference.

    Each sequence cell is the plain concatenated transcription, so planted
    strings come back byte-identical; the reference row is always last.
    """
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}; expected 'markdown'")
    if not decoded:
        raise ValueError("no decoded layers to display")
    lines = [f"### {bundle.utterance_id}", "", "| layer | sequence |", "| --- | --- |"]
    for layer in sorted(decoded, reverse=True):
        hypothesis, _ = decoded[layer]
        lines.append(f"| {layer} | {hypothesis.text} |")
    lines.append(f"| reference | {bundle.reference.text} |")
    return "\n".join(lines) + "\n"
