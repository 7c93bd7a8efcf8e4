"""Hypothesis-to-reference alignment and per-position error labelling.

The default aligner is Ratcliff-Obershelp: find the longest contiguous
matching block (ties go to the block starting earliest in the reference, then
earliest in the hypothesis), recurse on the unmatched left and right
remainders, and turn the gaps between matching blocks into replace / delete /
insert opcodes.  No junk or popularity heuristics are applied; phoneme
alphabets are small and silently dropping frequent tokens would change
alignments.

A minimal-edit-distance (Levenshtein) aligner is available behind
``mode="levenshtein"`` for sensitivity analysis.  It is never the default:
the two algorithms disagree on some inputs.

Alignment is pure; pairs can be aligned in parallel across utterances and
layers with no shared state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

HIT = "hit"
SUBSTITUTION = "substitution"
DELETION = "deletion"
INSERTION = "insertion"

Opcode = tuple[str, int, int, int, int]
Label = tuple[str, "str | None"]

ALIGN_MODES = ("ratcliff", "levenshtein")


class ErrorCounts(NamedTuple):
    hits: int
    substitutions: int
    deletions: int
    insertions: int


@dataclass(frozen=True)
class AlignmentOutcome:
    """Opcodes plus per-position labels for one (reference, hypothesis) pair.

    ``opcodes`` tile both sequences exactly, difflib-style:
    ``(tag, ref_start, ref_end, hyp_start, hyp_end)`` with tag one of
    ``equal`` / ``replace`` / ``delete`` / ``insert``.  ``ref_labels`` carries
    one ``(kind, counterpart)`` entry per reference position, where kind is
    ``hit``, ``substitution`` (counterpart = hypothesis token) or ``deletion``;
    ``hyp_labels`` mirrors that with ``insertion`` instead of ``deletion`` and
    the reference token as the substitution counterpart.
    """

    ref_tokens: tuple[str, ...]
    hyp_tokens: tuple[str, ...]
    opcodes: tuple[Opcode, ...]
    ref_labels: tuple[Label, ...]
    hyp_labels: tuple[Label, ...]
    counts: ErrorCounts


def _longest_match(a, b2j, alo, ahi, blo, bhi):
    # Longest block with a[i:i+k] == b[j:j+k] inside the window; among maximal
    # blocks the one with smallest i wins, then smallest j.
    best_i, best_j, best_size = alo, blo, 0
    run_lengths: dict[int, int] = {}
    for i in range(alo, ahi):
        new_runs: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            if j < blo:
                continue
            if j >= bhi:
                break
            size = new_runs[j] = run_lengths.get(j - 1, 0) + 1
            if size > best_size:
                best_i, best_j, best_size = i - size + 1, j - size + 1, size
        run_lengths = new_runs
    return best_i, best_j, best_size


def matching_blocks(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int, int]]:
    """Ratcliff-Obershelp matching blocks, adjacent blocks merged, terminated
    by the ``(len(a), len(b), 0)`` sentinel."""
    b2j: dict[str, list[int]] = {}
    for j, tok in enumerate(b):
        b2j.setdefault(tok, []).append(j)

    pending = [(0, len(a), 0, len(b))]
    found: list[tuple[int, int, int]] = []
    while pending:
        alo, ahi, blo, bhi = pending.pop()
        i, j, size = _longest_match(a, b2j, alo, ahi, blo, bhi)
        if size:
            found.append((i, j, size))
            if alo < i and blo < j:
                pending.append((alo, i, blo, j))
            if i + size < ahi and j + size < bhi:
                pending.append((i + size, ahi, j + size, bhi))
    found.sort()

    merged: list[tuple[int, int, int]] = []
    for i, j, size in found:
        if merged and merged[-1][0] + merged[-1][2] == i and merged[-1][1] + merged[-1][2] == j:
            merged[-1] = (merged[-1][0], merged[-1][1], merged[-1][2] + size)
        else:
            merged.append((i, j, size))
    merged.append((len(a), len(b), 0))
    return merged


def _opcodes_from_blocks(blocks: list[tuple[int, int, int]]) -> list[Opcode]:
    ops: list[Opcode] = []
    ref_pos = hyp_pos = 0
    for i, j, size in blocks:
        if ref_pos < i and hyp_pos < j:
            ops.append(("replace", ref_pos, i, hyp_pos, j))
        elif ref_pos < i:
            ops.append(("delete", ref_pos, i, hyp_pos, j))
        elif hyp_pos < j:
            ops.append(("insert", ref_pos, i, hyp_pos, j))
        ref_pos, hyp_pos = i + size, j + size
        if size:
            ops.append(("equal", i, ref_pos, j, hyp_pos))
    return ops


def ratcliff_opcodes(a: Sequence[str], b: Sequence[str]) -> list[Opcode]:
    return _opcodes_from_blocks(matching_blocks(a, b))


def levenshtein_opcodes(a: Sequence[str], b: Sequence[str]) -> list[Opcode]:
    """Minimal-edit opcodes (unit costs).  Backtrace prefers match/substitute,
    then delete, then insert, which makes the output deterministic."""
    n, m = len(a), len(b)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            same = a[i - 1] == b[j - 1]
            dist[i][j] = min(
                dist[i - 1][j - 1] + (0 if same else 1),
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
            )
    steps: list[str] = []
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (0 if a[i - 1] == b[j - 1] else 1):
            steps.append("equal" if a[i - 1] == b[j - 1] else "replace")
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            steps.append("delete")
            i -= 1
        else:
            steps.append("insert")
            j -= 1
    steps.reverse()

    ops: list[Opcode] = []
    ref_pos = hyp_pos = 0
    for tag in steps:
        dr = 1 if tag in ("equal", "replace", "delete") else 0
        dh = 1 if tag in ("equal", "replace", "insert") else 0
        if ops and ops[-1][0] == tag:
            last = ops[-1]
            ops[-1] = (tag, last[1], last[2] + dr, last[3], last[4] + dh)
        else:
            ops.append((tag, ref_pos, ref_pos + dr, hyp_pos, hyp_pos + dh))
        ref_pos += dr
        hyp_pos += dh
    return ops


def classify_replace(
    ref_span: Sequence[str], hyp_span: Sequence[str]
) -> tuple[list[tuple[str, str]], list[str], list[str]]:
    """Split one replace block into (substitution pairs, leftover deletions,
    leftover insertions).

    Pairing is positional: the leading ``min(m, n)`` tokens substitute for
    each other; whichever side is longer contributes its trailing tokens as
    deletions (reference side) or insertions (hypothesis side).
    """
    if not ref_span or not hyp_span:
        raise ValueError("classify_replace requires two non-empty spans")
    paired = min(len(ref_span), len(hyp_span))
    pairs = [(ref_span[k], hyp_span[k]) for k in range(paired)]
    deleted = list(ref_span[paired:])
    inserted = list(hyp_span[paired:])
    return pairs, deleted, inserted


def align(ref: Sequence[str], hyp: Sequence[str], mode: str = "ratcliff") -> AlignmentOutcome:
    """Align ``hyp`` against ``ref`` and label every position of both.

    Either sequence may be empty.  ``mode`` selects the opcode algorithm;
    see the module docstring for why ``ratcliff`` is the default.
    """
    if mode not in ALIGN_MODES:
        raise ValueError(f"unknown alignment mode {mode!r}; expected one of {ALIGN_MODES}")
    ref_tokens = tuple(ref)
    hyp_tokens = tuple(hyp)
    ops = (
        ratcliff_opcodes(ref_tokens, hyp_tokens)
        if mode == "ratcliff"
        else levenshtein_opcodes(ref_tokens, hyp_tokens)
    )

    ref_labels: list[Label] = [None] * len(ref_tokens)  # type: ignore[list-item]
    hyp_labels: list[Label] = [None] * len(hyp_tokens)  # type: ignore[list-item]
    hits = subs = dels = ins = 0
    for tag, i1, i2, j1, j2 in ops:
        if tag == "equal":
            for k in range(i2 - i1):
                ref_labels[i1 + k] = (HIT, None)
                hyp_labels[j1 + k] = (HIT, None)
            hits += i2 - i1
        elif tag == "delete":
            for k in range(i1, i2):
                ref_labels[k] = (DELETION, None)
            dels += i2 - i1
        elif tag == "insert":
            for k in range(j1, j2):
                hyp_labels[k] = (INSERTION, None)
            ins += j2 - j1
        else:
            pairs, deleted, inserted = classify_replace(ref_tokens[i1:i2], hyp_tokens[j1:j2])
            for k, (ref_tok, hyp_tok) in enumerate(pairs):
                ref_labels[i1 + k] = (SUBSTITUTION, hyp_tok)
                hyp_labels[j1 + k] = (SUBSTITUTION, ref_tok)
            for k in range(len(deleted)):
                ref_labels[i1 + len(pairs) + k] = (DELETION, None)
            for k in range(len(inserted)):
                hyp_labels[j1 + len(pairs) + k] = (INSERTION, None)
            subs += len(pairs)
            dels += len(deleted)
            ins += len(inserted)

    return AlignmentOutcome(
        ref_tokens=ref_tokens,
        hyp_tokens=hyp_tokens,
        opcodes=tuple(ops),
        ref_labels=tuple(ref_labels),
        hyp_labels=tuple(hyp_labels),
        counts=ErrorCounts(hits, subs, dels, ins),
    )
