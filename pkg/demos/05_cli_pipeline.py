#!/usr/bin/env python
"""Drive the command-line pipeline end to end in a scratch directory:
synth -> decode -> score -> regressions."""

import json
import tempfile
from pathlib import Path

from ctclens.cli import main

plan = {
    "utterances": [
        {
            "utterance_id": "utt_01",
            "reference": "tamaneka",
            "per_layer_targets": {"24": "tamaneka", "23": "tamanEka", "22": "tamnEka"},
        },
        {
            "utterance_id": "utt_02",
            "reference": "domisuna",
            "per_layer_targets": {"24": "domisona", "23": "domisuna", "22": "domisuna"},
        },
    ]
}

with tempfile.TemporaryDirectory() as scratch:
    base = Path(scratch)
    plan_path = base / "plan.json"
    plan_path.write_text(json.dumps(plan))

    corpus = base / "corpus"
    assert main(["synth", str(plan_path), "--out", str(corpus), "--seed", "7"]) == 0

    print("\n=== side-by-side decode of utt_02 ===")
    main(["decode", str(corpus / "utt_02")])

    print("\n=== corpus layer table ===")
    main(["score", str(corpus)])

    print("\n=== regressions (utt_02's u -> o at the deepest layer) ===")
    main(["regressions", str(corpus)])
