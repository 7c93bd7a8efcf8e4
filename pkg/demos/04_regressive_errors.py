#!/usr/bin/env python
"""Find regressive errors: positions a shallower layer gets right that the
deepest layer gets wrong."""

from ctclens import align, detect, summarize, tokenize

# the shallower layers recognize every token; the deepest layer swaps the
# "u" for an "o" and drops the "r" entirely
reference = tokenize("XYuZWrQV")
hypotheses = {
    22: "XYuZWrQV",
    23: "XYuZWrQV",
    24: "XYoZWQV",
}

alignments = {
    layer: align(reference, tokenize(text)) for layer, text in hypotheses.items()
}

events = detect(alignments, "demo_utterance")
for event in events:
    got = f"-> {event.replacement}" if event.replacement else "(deleted)"
    print(
        f"ref[{event.ref_index}] = {event.ref_token!r}: hit at layer "
        f"{event.source_layer}, {event.kind} at layer {event.target_layer} {got}"
    )

summary = summarize(events)
print("\ntotals:", summary.by_kind)
print("most affected tokens:", summary.by_token)

# exhaustive mode counts each (shallower, deeper) pair separately
exhaustive = detect(alignments, "demo_utterance", mode="exhaustive")
print(f"\ndefault events: {len(events)}, exhaustive events: {len(exhaustive)}")
