"""Synthetic bundle generation from planted per-layer targets.

Given a reference and a target hypothesis per layer, this builds logit
matrices whose greedy decode reproduces each target exactly: every token gets
``frames_per_token`` consecutive frames where its logit is ``margin`` while
all other entries draw i.i.d. uniform noise from [-noise_scale, 0], and
consecutive tokens are separated by ``blank_frames_between`` blank frames
(at least one is required between repeated tokens, or the collapse would
merge them).  Layers are padded with trailing blank frames to a common length.

Plan files are JSON.  A single-utterance plan mirrors the InjectionPlan
fields (``reference`` and the ``per_layer_targets`` values given as raw
strings) plus the carrier fields ``utterance_id``, ``tokenizer``, ``vocab``
and ``blank``; a corpus plan is ``{"vocab": ..., "blank": ...,
"tokenizer": ..., "utterances": [<plan>, ...]}`` with the top-level values
serving as defaults.  When no vocabulary is given, one is derived from the
tokens in play with the blank token at id 0.

Generation is pure given the seed: the same plan always produces a
bit-identical bundle, and utterances can be generated in parallel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .bundle import LayerLogitBundle, PhonemeSequence, tokenize

DEFAULT_BLANK_TOKEN = "<blank>"


@dataclass(frozen=True)
class InjectionPlan:
    """Recipe for one synthetic utterance."""

    reference: PhonemeSequence
    per_layer_targets: dict[int, PhonemeSequence]
    frames_per_token: int = 4
    blank_frames_between: int = 1
    margin: float = 8.0
    noise_scale: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.frames_per_token < 1:
            raise ValueError(f"frames_per_token must be positive, got {self.frames_per_token}")
        if self.blank_frames_between < 0:
            raise ValueError(f"blank_frames_between must be >= 0, got {self.blank_frames_between}")
        if not self.margin > 0:
            raise ValueError(f"margin must be positive, got {self.margin}")
        if self.noise_scale < 0:
            raise ValueError(f"noise_scale must be >= 0, got {self.noise_scale}")


def derive_vocab(plan: InjectionPlan, blank_token: str = DEFAULT_BLANK_TOKEN) -> list[str]:
    """Blank token at id 0 followed by every token the plan mentions, sorted."""
    tokens = set(plan.reference)
    for target in plan.per_layer_targets.values():
        tokens.update(target)
    if blank_token in tokens:
        raise ValueError(f"blank token {blank_token!r} collides with a plan token")
    return [blank_token] + sorted(tokens)


def _frame_track(target: PhonemeSequence, token_ids: Mapping[str, int], blank_id: int,
                 plan: InjectionPlan) -> list[int]:
    track: list[int] = []
    previous: str | None = None
    for token in target:
        if token not in token_ids:
            raise ValueError(f"target token {token!r} is not in the vocabulary")
        if previous is not None:
            if plan.blank_frames_between == 0 and token == previous:
                raise ValueError(
                    f"repeated token {token!r} needs blank_frames_between >= 1 to survive collapse"
                )
            track.extend([blank_id] * plan.blank_frames_between)
        track.extend([token_ids[token]] * plan.frames_per_token)
        previous = token
    return track


def generate(
    plan: InjectionPlan,
    vocab: Sequence[str],
    blank_id: int,
    utterance_id: str = "synthetic",
    tokenizer: str = "chars",
) -> LayerLogitBundle:
    """Build a bundle whose greedy decode equals the plan targets, layer by layer."""
    vocab = list(vocab)
    token_ids = {token: i for i, token in enumerate(vocab)}
    if len(token_ids) != len(vocab):
        # duplicate vocabulary entries would make token ids ambiguous
        raise ValueError("vocabulary entries must be unique")

    tracks = {
        index: _frame_track(target, token_ids, blank_id, plan)
        for index, target in plan.per_layer_targets.items()
    }
    total_frames = max((len(t) for t in tracks.values()), default=0)
    rng = np.random.default_rng(plan.seed)

    layers: list[tuple[int, np.ndarray]] = []
    for index in sorted(tracks):
        track = tracks[index] + [blank_id] * (total_frames - len(tracks[index]))
        logits = rng.uniform(-plan.noise_scale, 0.0, size=(total_frames, len(vocab)))
        logits[np.arange(total_frames), track] = plan.margin
        layers.append((index, logits.astype("<f4")))

    return LayerLogitBundle(
        utterance_id=utterance_id,
        layers=layers,
        vocab=vocab,
        blank_id=blank_id,
        reference=plan.reference,
        tokenizer=tokenizer,
        metadata={"seed": str(plan.seed)},
    )


def _plan_from_dict(raw: Mapping, tokenizer: str) -> InjectionPlan:
    for key in ("reference", "per_layer_targets"):
        if key not in raw:
            raise ValueError(f"plan: missing field {key!r}")
    targets = {
        int(layer): tokenize(text, tokenizer)
        for layer, text in raw["per_layer_targets"].items()
    }
    kwargs = {}
    for key in ("frames_per_token", "blank_frames_between", "margin", "noise_scale", "seed"):
        if key in raw:
            kwargs[key] = raw[key]
    return InjectionPlan(
        reference=tokenize(raw["reference"], tokenizer),
        per_layer_targets=targets,
        **kwargs,
    )


@dataclass(frozen=True)
class PlannedUtterance:
    utterance_id: str
    plan: InjectionPlan
    vocab: list[str]
    blank_id: int
    tokenizer: str = "chars"

    def build(self) -> LayerLogitBundle:
        return generate(self.plan, self.vocab, self.blank_id, self.utterance_id, self.tokenizer)


def load_plan_file(path: str | Path, seed_override: int | None = None) -> list[PlannedUtterance]:
    """Parse a plan JSON file into buildable utterances (see module docstring)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    entries = raw["utterances"] if "utterances" in raw else [raw]
    if not isinstance(entries, list) or not entries:
        raise ValueError(f"{path}: 'utterances' must be a non-empty list")

    planned: list[PlannedUtterance] = []
    for position, entry in enumerate(entries):
        tokenizer = entry.get("tokenizer", raw.get("tokenizer", "chars"))
        if seed_override is not None:
            entry = {**entry, "seed": seed_override + position}
        plan = _plan_from_dict(entry, tokenizer)
        blank_token = entry.get("blank", raw.get("blank", DEFAULT_BLANK_TOKEN))
        vocab = entry.get("vocab", raw.get("vocab"))
        if vocab is None:
            vocab = derive_vocab(plan, blank_token)
        if blank_token not in vocab:
            raise ValueError(f"{path}: blank token {blank_token!r} not in vocabulary")
        planned.append(
            PlannedUtterance(
                utterance_id=entry.get("utterance_id", f"synthetic_{position:03d}"),
                plan=plan,
                vocab=list(vocab),
                blank_id=vocab.index(blank_token),
                tokenizer=tokenizer,
            )
        )
    return planned
