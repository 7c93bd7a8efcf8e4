#!/usr/bin/env python
"""Synthesize a corpus whose quality decays as layers are removed, then look
at the per-layer PER trend and the confusion tables."""

from ctclens import (
    InjectionPlan,
    confusion_matrices,
    decode_all_layers,
    derive_vocab,
    emit_confusion,
    emit_layer_table,
    generate,
    score,
    tokenize,
    trend,
)

# three utterances; deeper layers are planted progressively worse:
# layer 24 is clean, 23 substitutes one vowel, 22 also deletes one
recipes = {
    "utt_01": ("tamaneka", {24: "tamaneka", 23: "tamanEka", 22: "tamnEka"}),
    "utt_02": ("domisuna", {24: "domisuna", 23: "domisUna", 22: "dmisUna"}),
    "utt_03": ("rekolavi", {24: "rekolavi", 23: "rekOlavi", 22: "rkOlavi"}),
}

reports = []
for utterance_id, (reference, targets) in recipes.items():
    plan = InjectionPlan(
        reference=tokenize(reference),
        per_layer_targets={layer: tokenize(text) for layer, text in targets.items()},
        seed=42,
    )
    bundle = generate(plan, derive_vocab(plan), 0, utterance_id)
    for layer, (hypothesis, _) in decode_all_layers(bundle).items():
        reports.append(score(bundle.reference, hypothesis, utterance_id, layer))

corpus_trend = trend(reports)
print("layer table (csv):")
print(emit_layer_table(corpus_trend, "csv"))

print("confusion rows (layer, ref, hyp-or-DEL, count):")
print(emit_confusion(confusion_matrices(reports), "csv"))
