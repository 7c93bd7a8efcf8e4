"""Command-line front end: decode, score, regressions, synth.

Data goes to files (``--out``) or standard output; diagnostics go to standard
error.  Exit code 0 means no errors.  An optional config file (one
``key=value`` per line, keys named after the long flags) supplies defaults;
explicit flags always win.  ``--seed`` is honoured by ``synth`` only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .align import align
from .bundle import (
    BundleFormatError,
    LayerLogitBundle,
    load_corpus,
    read_bundle,
    retokenize,
    tokenize,
    write_bundle,
)
from .decoder import decode_all_layers
from .metrics import LayerReport, score, trend
from .regressions import detect, summarize
from .report import emit_layer_table, emit_sidebyside
from .synth import load_plan_file

HARD_DEFAULTS = {
    "layers": None,
    "tokenizer": None,
    "corpus_per": "macro",
    "mode": "default",
    "out": None,
    "seed": None,
    "allow_ragged": False,
}


def _read_config(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{line_no}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args: argparse.Namespace, config: dict[str, str]) -> argparse.Namespace:
    for key, fallback in HARD_DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is not None:
            continue
        if key in config:
            raw = config[key]
            if key == "allow_ragged":
                setattr(args, key, raw.lower() in ("1", "true", "yes"))
            elif key == "seed":
                setattr(args, key, int(raw))
            else:
                setattr(args, key, raw)
        else:
            setattr(args, key, fallback)
    return args


def _parse_layers(spec: str | None) -> list[int] | None:
    if spec in (None, ""):
        return None
    try:
        return [int(part) for part in str(spec).split(",") if part != ""]
    except ValueError:
        raise ValueError(f"--layers expects comma-separated integers, got {spec!r}") from None


def _write_or_print(out_dir: str | None, filename: str, document: str) -> None:
    if out_dir is None:
        sys.stdout.write(document)
    else:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(document, encoding="utf-8")


def _report_payload(report: LayerReport) -> dict:
    return {
        "utterance_id": report.utterance_id,
        "layer": report.layer_index,
        "per": report.per,
        "counts": {
            "hits": report.counts.hits,
            "substitutions": report.counts.substitutions,
            "deletions": report.counts.deletions,
            "insertions": report.counts.insertions,
        },
        "substitutions": sorted(
            [ref, hyp, count] for (ref, hyp), count in report.substitution_pairs.items()
        ),
        "deletions": sorted([tok, count] for tok, count in report.deleted_tokens.items()),
        "insertions": sorted([tok, count] for tok, count in report.inserted_tokens.items()),
    }


def _score_bundle(bundle: LayerLogitBundle, tokenizer: str | None) -> list[LayerReport]:
    mode = tokenizer or bundle.tokenizer
    reference = retokenize(bundle.reference, mode)
    reports = []
    for layer, (hypothesis, _) in sorted(decode_all_layers(bundle).items()):
        rehyp = tokenize(hypothesis.text, mode)
        reports.append(score(reference, rehyp, bundle.utterance_id, layer))
    return reports


def cmd_decode(args: argparse.Namespace) -> int:
    bundle = read_bundle(args.bundle_dir)
    decoded = decode_all_layers(bundle)
    wanted = _parse_layers(args.layers)
    if wanted is not None:
        missing = [layer for layer in wanted if layer not in decoded]
        if missing:
            raise ValueError(
                f"unknown layer(s) {missing}; available: {sorted(decoded)}"
            )
        decoded = {layer: decoded[layer] for layer in wanted}
    document = emit_sidebyside(bundle, decoded)
    hypotheses = {
        str(layer): {"tokens": list(seq.tokens), "text": seq.text}
        for layer, (seq, _) in sorted(decoded.items())
    }
    if args.out is None:
        sys.stdout.write(document)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sidebyside.md").write_text(document, encoding="utf-8")
        (out / "hypotheses.json").write_text(
            json.dumps(hypotheses, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    bundles = load_corpus(args.corpus_dir)
    if args.tokenizer not in (None, "chars", "sampa-length"):
        raise ValueError(f"--tokenizer must be chars or sampa-length, got {args.tokenizer!r}")
    if args.corpus_per not in ("macro", "micro"):
        raise ValueError(f"--corpus-per must be macro or micro, got {args.corpus_per!r}")
    reports: list[LayerReport] = []
    for bundle in bundles:
        reports.extend(_score_bundle(bundle, args.tokenizer))
    corpus_trend = trend(reports, allow_ragged=args.allow_ragged)

    table_csv = emit_layer_table(corpus_trend, "csv")
    chosen = {
        str(layer): (
            point.mean_per_macro if args.corpus_per == "macro" else point.mean_per_micro
        )
        for layer, point in corpus_trend.per_layer.items()
    }
    if args.out is None:
        sys.stdout.write(table_csv)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "layer_table.csv").write_text(table_csv, encoding="utf-8")
        (out / "layer_table.json").write_text(emit_layer_table(corpus_trend, "json"), encoding="utf-8")
        (out / "reports.json").write_text(
            json.dumps([_report_payload(r) for r in reports], ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
        (out / "summary.json").write_text(
            json.dumps(
                {
                    "utterances": corpus_trend.utterances,
                    "corpus_per": args.corpus_per,
                    "per_layer": chosen,
                },
                ensure_ascii=False,
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
    for layer in corpus_trend.layers_descending():
        print(
            f"corpus PER ({args.corpus_per}) @ layer {layer}: {chosen[str(layer)]:.2f}",
            file=sys.stderr,
        )
    return 0


def cmd_regressions(args: argparse.Namespace) -> int:
    bundles = load_corpus(args.corpus_dir)
    if args.mode not in ("default", "exhaustive"):
        raise ValueError(f"--mode must be default or exhaustive, got {args.mode!r}")
    events = []
    for bundle in bundles:
        reference = bundle.reference
        alignments = {
            layer: align(reference, tokenize(seq.text, bundle.tokenizer))
            for layer, (seq, _) in decode_all_layers(bundle).items()
        }
        events.extend(detect(alignments, bundle.utterance_id, mode=args.mode))
    summary = summarize(events)
    payload = {
        "events": [
            {
                "utterance_id": e.utterance_id,
                "ref_index": e.ref_index,
                "ref_token": e.ref_token,
                "source_layer": e.source_layer,
                "target_layer": e.target_layer,
                "kind": e.kind,
                "replacement": e.replacement,
            }
            for e in events
        ],
        "summary": {
            "total": summary.total,
            "by_kind": summary.by_kind,
            "by_token": [[token, count] for token, count in summary.by_token],
        },
    }
    document = json.dumps(payload, ensure_ascii=False, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(document)
    else:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "events.json").write_text(
            json.dumps(payload["events"], ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        (out / "summary.json").write_text(
            json.dumps(payload["summary"], ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
    print(
        f"regressions: {summary.total} total "
        f"({summary.by_kind.get('substitution', 0)} substitution, "
        f"{summary.by_kind.get('deletion', 0)} deletion)",
        file=sys.stderr,
    )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    if args.out is None:
        raise ValueError("synth needs an output directory (--out flag or config)")
    planned = load_plan_file(args.plan, seed_override=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for utterance in planned:
        bundle = utterance.build()
        write_bundle(bundle, out / utterance.utterance_id)
        print(f"wrote {out / utterance.utterance_id}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctclens",
        description="Layer-wise CTC phoneme decoding diagnostics over logit bundles.",
    )
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="greedy-decode a bundle and show layers side by side")
    p.add_argument("bundle_dir", help="bundle directory (contains manifest.json)")
    p.add_argument("--layers", help="comma-separated layer indices (default: all)")
    p.add_argument("--out", help="output directory (default: markdown to stdout)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("score", help="PER and error profile for every bundle at every layer")
    p.add_argument("corpus_dir", help="directory of bundle directories")
    p.add_argument("--tokenizer", choices=["chars", "sampa-length"],
                   help="re-tokenization mode (default: each bundle's manifest setting)")
    p.add_argument("--corpus-per", dest="corpus_per", choices=["macro", "micro"],
                   help="corpus averaging reported in the summary (default: macro)")
    p.add_argument("--allow-ragged", dest="allow_ragged", action="store_const", const=True,
                   help="accept utterances with differing layer sets")
    p.add_argument("--out", help="output directory (default: layer table to stdout)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("regressions", help="detect hits that degrade at deeper layers")
    p.add_argument("corpus_dir", help="directory of bundle directories")
    p.add_argument("--mode", choices=["default", "exhaustive"],
                   help="default: deepest-layer targets, one event per position; "
                        "exhaustive: every layer pair")
    p.add_argument("--out", help="output directory (default: JSON to stdout)")
    p.set_defaults(func=cmd_regressions)

    p = sub.add_parser("synth", help="generate bundles from a JSON plan")
    p.add_argument("plan", help="plan JSON file")
    p.add_argument("--out", help="directory to write bundle directories into")
    p.add_argument("--seed", type=int, help="override the plan seeds")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _read_config(args.config)
        args = _resolve(args, config)
        return args.func(args)
    except (ValueError, OSError, KeyError, BundleFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
