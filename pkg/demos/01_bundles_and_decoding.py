#!/usr/bin/env python
"""Build a toy logit matrix, watch the greedy CTC collapse, and round-trip a
bundle through the on-disk format."""

import tempfile
from pathlib import Path

import numpy as np

from ctclens import LayerLogitBundle, greedy_decode, read_bundle, tokenize, write_bundle

vocab = ["<blank>", "a", "b"]

# six frames: a a <blank> a b b  ->  collapses to "a a b"
frame_winners = [1, 1, 0, 1, 2, 2]
logits = np.full((6, 3), -4.0, dtype=np.float32)
for frame, token_id in enumerate(frame_winners):
    logits[frame, token_id] = 4.0

token_ids, path = greedy_decode(logits, blank_id=0)
print("frame argmaxes:", list(path.frame_argmax))
print("emitted tokens:", [vocab[i] for i in token_ids])
print("emitted spans (token, start, end):", path.emitted_spans)

# the repeat split by a blank survives; the adjacent repeat does not
assert [vocab[i] for i in token_ids] == ["a", "a", "b"]

bundle = LayerLogitBundle(
    utterance_id="demo_utterance",
    layers=[(23, logits), (24, logits)],
    vocab=vocab,
    blank_id=0,
    reference=tokenize("aab"),
    metadata={"speaker": "demo"},
)

with tempfile.TemporaryDirectory() as scratch:
    bundle_dir = Path(scratch) / "demo_utterance"
    write_bundle(bundle, bundle_dir)
    print("\non disk:", sorted(p.name for p in bundle_dir.iterdir()))
    restored = read_bundle(bundle_dir)
    print("round-trip equal:", restored == bundle)
