from __future__ import annotations

import difflib

import pytest

from ctclens.align import (
    DELETION,
    HIT,
    INSERTION,
    SUBSTITUTION,
    align,
    classify_replace,
    levenshtein_opcodes,
    ratcliff_opcodes,
)
from ctclens.bundle import tokenize
from conftest import random_tokens


def difflib_opcodes(a, b):
    matcher = difflib.SequenceMatcher(None, a, b, autojunk=False)
    return [tuple(op) for op in matcher.get_opcodes()]


def test_identity_yields_single_equal_opcode():
    for text in ("a", "abba", "eekambjadame4a"):
        ref = tuple(text)
        outcome = align(ref, ref)
        assert outcome.opcodes == (("equal", 0, len(ref), 0, len(ref)),)
        assert outcome.counts == (len(ref), 0, 0, 0)


def test_empty_inputs():
    outcome = align((), ())
    assert outcome.opcodes == ()
    assert outcome.counts == (0, 0, 0, 0)
    assert align(tuple("abc"), ()).counts == (0, 0, 3, 0)
    assert align((), tuple("abc")).counts == (0, 0, 0, 3)


def test_published_deletion_row():
    # deepest-minus-two hypothesis against its reference: one dropped "e"
    outcome = align(tokenize("eekambjadame4a"), tokenize("ekambjadame4a"))
    assert outcome.counts == (13, 0, 1, 0)
    assert outcome.ref_labels[0] == (DELETION, None)
    assert all(label == (HIT, None) for label in outcome.ref_labels[1:])


def test_oracle_equivalence_500_random_pairs(rng):
    alphabet = list("abcdef")
    mismatches = 0
    for _ in range(500):
        ref = random_tokens(rng, alphabet, 12)
        hyp = random_tokens(rng, alphabet, 12)
        if ratcliff_opcodes(ref, hyp) != difflib_opcodes(ref, hyp):
            mismatches += 1
    assert mismatches == 0


def test_classify_replace_single_pairs():
    assert classify_replace(["E"], ["e"]) == ([("E", "e")], [], [])
    assert classify_replace(["G"], ["g"]) == ([("G", "g")], [], [])


def test_classify_replace_uneven_spans():
    pairs, deleted, inserted = classify_replace(["a", "b", "c"], ["x"])
    assert pairs == [("a", "x")]
    assert deleted == ["b", "c"]
    assert inserted == []
    pairs, deleted, inserted = classify_replace(["a"], ["x", "y"])
    assert pairs == [("a", "x")]
    assert deleted == []
    assert inserted == ["y"]


def test_classify_replace_rejects_empty_span():
    with pytest.raises(ValueError):
        classify_replace([], ["x"])
    with pytest.raises(ValueError):
        classify_replace(["x"], [])


def test_tiling_invariant_random_pairs(rng):
    alphabet = list("abcdefgh")
    for _ in range(1000):
        ref = random_tokens(rng, alphabet, 14)
        hyp = random_tokens(rng, alphabet, 14)
        outcome = align(ref, hyp)
        ref_pos = hyp_pos = 0
        for tag, i1, i2, j1, j2 in outcome.opcodes:
            assert (i1, j1) == (ref_pos, hyp_pos)
            assert i2 >= i1 and j2 >= j1
            ref_pos, hyp_pos = i2, j2
        assert (ref_pos, hyp_pos) == (len(ref), len(hyp))
        hits, subs, dels, ins = outcome.counts
        assert hits + subs + dels == len(ref)
        assert hits + subs + ins == len(hyp)
        assert sum(1 for kind, _ in outcome.ref_labels if kind == HIT) == hits
        assert sum(1 for kind, _ in outcome.ref_labels if kind == SUBSTITUTION) == subs
        assert sum(1 for kind, _ in outcome.ref_labels if kind == DELETION) == dels
        assert sum(1 for kind, _ in outcome.hyp_labels if kind == INSERTION) == ins


def test_swap_symmetry_levenshtein_total_errors(rng):
    # minimal edit distance is symmetric, so the levenshtein mode must report
    # the same total error count in both directions
    alphabet = list("abcde")
    for _ in range(300):
        ref = random_tokens(rng, alphabet, 10)
        hyp = random_tokens(rng, alphabet, 10)
        forward = align(ref, hyp, mode="levenshtein").counts
        backward = align(hyp, ref, mode="levenshtein").counts
        assert (
            forward.substitutions + forward.deletions + forward.insertions
            == backward.substitutions + backward.deletions + backward.insertions
        )


def test_ratcliff_swap_asymmetry_matches_reference():
    # The greedy longest-block recursion is NOT swap-symmetric: the block it
    # commits to first depends on which sequence comes first, and the
    # remainders can then match different amounts.  This pair flips from two
    # matched tokens to one.  The behaviour must track the reference
    # implementation in both directions rather than any idealized symmetry.
    a, b = tuple("dc"), tuple("ceeddeebc")
    assert align(a, b).counts.hits == 2
    assert align(b, a).counts.hits == 1
    assert ratcliff_opcodes(a, b) == difflib_opcodes(a, b)
    assert ratcliff_opcodes(b, a) == difflib_opcodes(b, a)


def test_substitution_labels_carry_counterparts():
    outcome = align(tuple("aEb"), tuple("aeb"))
    assert outcome.ref_labels[1] == (SUBSTITUTION, "e")
    assert outcome.hyp_labels[1] == (SUBSTITUTION, "E")


def test_levenshtein_mode_is_minimal():
    # ratcliff and levenshtein legitimately disagree here: the longest-block
    # recursion can cost more edits than the minimal alignment
    ref = tuple("abcabba")
    hyp = tuple("cbabac")
    lev = align(ref, hyp, mode="levenshtein")
    rat = align(ref, hyp, mode="ratcliff")
    lev_errors = lev.counts.substitutions + lev.counts.deletions + lev.counts.insertions
    rat_errors = rat.counts.substitutions + rat.counts.deletions + rat.counts.insertions
    assert lev_errors <= rat_errors
    assert lev_errors == 4  # classic minimal distance for this pair is 4 edits


def test_levenshtein_opcodes_tile(rng):
    alphabet = list("abcd")
    for _ in range(200):
        ref = random_tokens(rng, alphabet, 9)
        hyp = random_tokens(rng, alphabet, 9)
        ops = levenshtein_opcodes(ref, hyp)
        ref_pos = hyp_pos = 0
        for tag, i1, i2, j1, j2 in ops:
            assert (i1, j1) == (ref_pos, hyp_pos)
            ref_pos, hyp_pos = i2, j2
        assert (ref_pos, hyp_pos) == (len(ref), len(hyp))


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        align(("a",), ("b",), mode="needleman")
