from __future__ import annotations

import numpy as np
import pytest

from ctclens.bundle import LayerLogitBundle, PhonemeSequence

# Layer-wise transcriptions for the five utterances with the largest PER
# reduction between the deepest layer and two layers earlier, as published;
# used throughout as planted ground truth.
TABLE_ROWS = {
    "03_F_extract_01": (
        "eekambjadame4a",
        {24: "ekambjadame:4a", 23: "ekambjadame:4a", 22: "ekambjadame4a"},
    ),
    "30_F_extract_04": (
        "ensudwamillaundiZi",
        {24: "iE5ntsu:tVmla:u5Nti:S", 23: "iE5ntsu:tamla:u5Nti:Si:", 22: "e:ntsutamla:u5tiSi"},
    ),
    "46_M_extract_04": (
        "dEdEGanivuntibiStiuzuGusakuzuapEtsauzu",
        {
            24: "dedega:nivutibiStozorUnsa:kuzo:apEttsa:zU",
            23: "dedega:nivutebiStuzogunsa:kuzo:apEtsa:zu",
            22: "dedega:nivutebStzorunsakuzoapEtsazu",
        },
    ),
    "30_F_extract_02": (
        "sunO4antazEti",
        {24: "snunorantazzaeti", 23: "snunorantazzaeti", 22: "snunorantazaeti"},
    ),
    "29_M_extract_03": (
        "mizEaGataudeGOnOSamullEDimiaE?",
        {24: "miza:gata:oudegonoSamuleDimiae", 23: "mizagata:oudegonoSamuleDimiae", 22: "mizagataodegonoSamuleDimiae"},
    ),
}


def random_tokens(rng: np.random.Generator, alphabet: list[str], max_len: int) -> tuple[str, ...]:
    length = int(rng.integers(0, max_len + 1))
    return tuple(alphabet[int(i)] for i in rng.integers(0, len(alphabet), size=length))


PHONE_POOL = list("abdefgijklmnorstuvzEGNOSZ45?ɔəʊʧ")


def random_bundle(rng: np.random.Generator) -> LayerLogitBundle:
    vocab_size = int(rng.integers(2, 24))
    phones = rng.choice(PHONE_POOL, size=vocab_size - 1, replace=False).tolist()
    vocab = ["<blank>"] + phones
    frames = int(rng.integers(0, 24))
    n_layers = int(rng.integers(1, 6))
    indices = sorted(rng.choice(np.arange(1, 40), size=n_layers, replace=False).tolist())
    layers = [
        (int(idx), rng.standard_normal((frames, vocab_size)).astype(np.float32))
        for idx in indices
    ]
    ref_len = int(rng.integers(1, 12))
    reference = PhonemeSequence(
        tuple(vocab[int(i)] for i in rng.integers(1, vocab_size, size=ref_len))
    )
    metadata = {} if rng.random() < 0.5 else {"speaker": "F01", "duration_s": "4.06"}
    return LayerLogitBundle(
        utterance_id=f"utt_{int(rng.integers(0, 10_000)):04d}",
        layers=layers,
        vocab=vocab,
        blank_id=0,
        reference=reference,
        metadata=metadata,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


# Planted regression roster: 53 reference positions correct two layers down
# but degraded at the deepest layer; 39 substitutions + 14 deletions, with a
# per-token profile topped by u(13) and r(7).
REGRESSION_ROSTER = {
    # token: (substitutions, deletions, replacement used for the subs)
    "u": (9, 4, "o"),
    "r": (5, 2, "l"),
    "n": (5, 1, "m"),
    "i": (4, 1, "e"),
    "a": (3, 1, "e"),
    "o": (2, 1, "u"),
    "s": (2, 1, "z"),
    "t": (2, 1, "d"),
    "m": (2, 1, "n"),
    "l": (3, 0, "r"),
    "d": (2, 1, "t"),
}

FILLER_POOL = list("ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")


def build_regression_corpus():
    """One utterance per roster token: the planted positions are hits at the
    two shallower layers and degrade at the deepest layer.

    Returns (corpus, expected) where corpus maps utterance_id ->
    (reference_text, {layer: target_text}) and expected lists
    (utterance_id, ref_index, token, kind, replacement_or_None).
    """
    corpus = {}
    expected = []
    for token, (n_subs, n_dels, replacement) in REGRESSION_ROSTER.items():
        events = n_subs + n_dels
        ref: list[str] = []
        degraded: list[str] = []
        positions: list[int] = []
        fillers = iter(FILLER_POOL)
        for slot in range(events):
            for _ in range(2):
                filler = next(fillers)
                ref.append(filler)
                degraded.append(filler)
            positions.append(len(ref))
            ref.append(token)
            if slot < n_subs:
                degraded.append(replacement)
            # deletions simply omit the token
        for _ in range(2):
            filler = next(fillers)
            ref.append(filler)
            degraded.append(filler)
        utterance_id = f"plant_{token}"
        corpus[utterance_id] = (
            "".join(ref),
            {22: "".join(ref), 23: "".join(ref), 24: "".join(degraded)},
        )
        for slot, ref_index in enumerate(positions):
            if slot < n_subs:
                expected.append((utterance_id, ref_index, token, "substitution", replacement))
            else:
                expected.append((utterance_id, ref_index, token, "deletion", None))
    return corpus, expected
