"""Command-line extractor: audio files in, layer logit bundles out.

Layer numbering: ``--layers 24,23,22`` asks for the outputs of transformer
blocks 24, 23 and 22, counting blocks from 1 with the convolutional feature
encoder excluded.  Getting this off by one corrupts every downstream table,
so the probe refuses indices outside 1..num_layers.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from .audio import load_waveform
from .bundles import write_bundle
from .probe import DEFAULT_MODEL, Recognizer, layer_logits, load_recognizer


def read_refs(path: str | Path) -> dict[str, str]:
    """Parse a TSV of ``filename<TAB>transcript`` lines."""
    refs: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise ValueError(f"{path}:{line_no}: expected filename<TAB>transcript")
        filename, transcript = line.split("\t", 1)
        refs[filename.strip()] = transcript.strip()
    return refs


def reference_for(refs: dict[str, str], audio_path: Path) -> str:
    for key in (audio_path.name, audio_path.stem, str(audio_path)):
        if key in refs:
            return refs[key]
    raise ValueError(f"no reference transcript for {audio_path.name} in the refs file")


def extract_file(
    recognizer: Recognizer,
    audio_path: Path,
    reference: str,
    layers: list[int],
    out_dir: Path,
    apply_final_norm: bool = True,
) -> Path:
    """Extract one utterance into ``out_dir/<stem>`` and return the bundle path."""
    waveform, duration = load_waveform(audio_path)
    produced = layer_logits(recognizer, waveform, layers, apply_final_norm)
    ordered = [(index, produced[index]) for index in sorted(produced)]
    metadata = {
        "source_audio": audio_path.name,
        "duration_s": f"{duration:.3f}",
        "sample_rate": "16000",
        "model": recognizer.model.name_or_path,
        "final_norm": "applied" if apply_final_norm else "skipped",
    }
    # phonemic transcripts carry no whitespace; drop any word separators
    reference = "".join(reference.split())
    return write_bundle(
        out_dir / audio_path.stem,
        utterance_id=audio_path.stem,
        layers=ordered,
        vocab=recognizer.vocab(),
        blank_id=recognizer.blank_id,
        reference=reference,
        metadata=metadata,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llb-extract",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("audio", nargs="+", help="wav files (resampled to 16 kHz mono)")
    parser.add_argument("--refs", required=True,
                        help="TSV file: filename<TAB>phonemic transcript")
    parser.add_argument("--out", required=True, help="directory to write bundles into")
    parser.add_argument("--model", default=DEFAULT_MODEL,
                        help="checkpoint name or local path (default: %(default)s)")
    parser.add_argument("--layers",
                        help="comma-separated block indices; default: the top six blocks")
    parser.add_argument("--no-final-norm", dest="final_norm", action="store_false",
                        help="probe raw block outputs without the final encoder norm")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        refs = read_refs(args.refs)
        recognizer = load_recognizer(args.model)
        if args.layers:
            layers = [int(part) for part in args.layers.split(",") if part]
        else:
            layers = recognizer.default_layers()
        out_dir = Path(args.out)
        for name in args.audio:
            audio_path = Path(name)
            reference = reference_for(refs, audio_path)
            bundle = extract_file(
                recognizer, audio_path, reference, layers, out_dir, args.final_norm
            )
            print(f"wrote {bundle}", file=sys.stderr)
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
