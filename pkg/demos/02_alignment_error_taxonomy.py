#!/usr/bin/env python
"""Align hypotheses against a reference and read off the error taxonomy:
hits, substitutions, deletions, insertions, and the PER they imply."""

from ctclens import align, per_improvement, score, tokenize

reference = tokenize("eekambjadame4a")

# two hypotheses for the same utterance, e.g. from two encoder depths:
# the deeper one lengthens a vowel and drops the initial "e"
deep = tokenize("ekambjadame:4a")
shallow = tokenize("ekambjadame4a")

for name, hypothesis in [("deep", deep), ("shallow", shallow)]:
    outcome = align(reference, hypothesis)
    print(f"--- {name}: {hypothesis.text}")
    for tag, i1, i2, j1, j2 in outcome.opcodes:
        print(f"  {tag:8s} ref[{i1}:{i2}] {''.join(reference[i1:i2]):9s}"
              f" hyp[{j1}:{j2}] {''.join(hypothesis[j1:j2])}")
    print("  counts:", outcome.counts)

deep_report = score(reference, deep, "demo", 24)
shallow_report = score(reference, shallow, "demo", 22)
print(f"\nPER deep    {deep_report.per:6.2f}%")
print(f"PER shallow {shallow_report.per:6.2f}%")
print(f"relative improvement {per_improvement(deep_report, shallow_report):.2f}%")

# length marks can be token-fused instead of counted separately
fused = align(tokenize("eekambjadame4a", "sampa-length"), tokenize("ekambjadame:4a", "sampa-length"))
print("\nsampa-length mode counts:", fused.counts)
print("substituted pair:", [l for l in fused.ref_labels if l[0] == "substitution"])
