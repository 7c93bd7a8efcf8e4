from __future__ import annotations

import json
import struct
import subprocess
import sys

import numpy as np
import pytest

from llb_extractor.audio import load_waveform
from llb_extractor.cli import main, read_refs
from llb_extractor.probe import layer_logits, load_recognizer, native_transcription

HEADER = struct.Struct("<4sIII")


def run_analysis_cli(*args: str) -> subprocess.CompletedProcess:
    """The analysis toolkit is consumed strictly through its CLI."""
    return subprocess.run(
        [sys.executable, "-m", "ctclens", *args], capture_output=True, text=True
    )


def read_matrix_header(path):
    with open(path, "rb") as fh:
        return HEADER.unpack(fh.read(HEADER.size))


def test_bundle_format_conformance(tiny_checkpoint, wav_16k, refs_file, tmp_path):
    out_dir = tmp_path / "bundles"
    code = main([str(wav_16k), "--refs", str(refs_file), "--out", str(out_dir),
                 "--model", tiny_checkpoint, "--layers", "4,3,2"])
    assert code == 0
    bundle = out_dir / "clip_16k"
    manifest = json.loads((bundle / "manifest.json").read_text())
    assert manifest["utterance_id"] == "clip_16k"
    assert manifest["reference"] == "tamaneka"
    assert manifest["blank_id"] == 0
    assert [entry["index"] for entry in manifest["layers"]] == [2, 3, 4]
    for entry in manifest["layers"]:
        magic, version, frames, width = read_matrix_header(bundle / entry["file"])
        assert magic == b"LLB1" and version == 1
        assert frames == entry["frames"]
        assert width == len(manifest["vocab"])
    assert manifest["metadata"]["final_norm"] == "applied"


def test_bundle_validates_in_analysis_pipeline(tiny_checkpoint, wav_16k, refs_file, tmp_path):
    out_dir = tmp_path / "bundles"
    assert main([str(wav_16k), "--refs", str(refs_file), "--out", str(out_dir),
                 "--model", tiny_checkpoint]) == 0
    scored = run_analysis_cli("score", str(out_dir))
    assert scored.returncode == 0, scored.stderr
    assert scored.stdout.startswith("layer,")


def test_final_layer_decode_parity(tiny_checkpoint, wav_16k, refs_file, tmp_path):
    # the cross-package contract: the analysis pipeline's decode of the
    # final-layer bundle must equal the checkpoint's own greedy transcription
    out_dir = tmp_path / "bundles"
    assert main([str(wav_16k), "--refs", str(refs_file), "--out", str(out_dir),
                 "--model", tiny_checkpoint]) == 0

    decode_dir = tmp_path / "decoded"
    result = run_analysis_cli("decode", str(out_dir / "clip_16k"), "--layers", "4",
                              "--out", str(decode_dir))
    assert result.returncode == 0, result.stderr
    hypotheses = json.loads((decode_dir / "hypotheses.json").read_text())
    pipeline_tokens = hypotheses["4"]["tokens"]

    recognizer = load_recognizer(tiny_checkpoint)
    waveform, _ = load_waveform(wav_16k)
    native = native_transcription(recognizer, waveform)
    assert pipeline_tokens == list(native)
    assert "".join(pipeline_tokens) == native
    assert len(native) > 0  # a silent-everywhere clip would make this vacuous


def test_layer_out_of_range(tiny_checkpoint, wav_16k):
    recognizer = load_recognizer(tiny_checkpoint)
    waveform, _ = load_waveform(wav_16k)
    with pytest.raises(ValueError, match=r"out of range.*1\.\.4"):
        layer_logits(recognizer, waveform, [5])
    with pytest.raises(ValueError, match="out of range"):
        layer_logits(recognizer, waveform, [0])


def test_default_layers_are_top_blocks(tiny_checkpoint):
    recognizer = load_recognizer(tiny_checkpoint)
    assert recognizer.default_layers() == [4, 3, 2, 1]
    assert recognizer.default_layers(2) == [4, 3]


def test_resampling_and_mono_mixdown(tiny_checkpoint, wav_8k_stereo, refs_file, tmp_path):
    waveform, duration = load_waveform(wav_8k_stereo)
    assert waveform.ndim == 1
    assert duration == pytest.approx(0.8, abs=0.01)
    assert len(waveform) == pytest.approx(16_000 * 0.8, rel=0.01)
    out_dir = tmp_path / "bundles"
    assert main([str(wav_8k_stereo), "--refs", str(refs_file), "--out", str(out_dir),
                 "--model", tiny_checkpoint, "--layers", "4"]) == 0
    manifest = json.loads((out_dir / "clip_8k_stereo" / "manifest.json").read_text())
    assert manifest["reference"] == "domisuna"


def test_final_norm_flag(tiny_checkpoint, wav_16k):
    recognizer = load_recognizer(tiny_checkpoint)
    waveform, _ = load_waveform(wav_16k)
    with_norm = layer_logits(recognizer, waveform, [4, 2], apply_final_norm=True)
    without_norm = layer_logits(recognizer, waveform, [4, 2], apply_final_norm=False)
    # the final layer always carries the encoder's closing norm; intermediate
    # layers change with the flag on this layer-norm layout
    assert np.array_equal(with_norm[4], without_norm[4])
    assert not np.array_equal(with_norm[2], without_norm[2])


def test_no_final_norm_recorded_in_metadata(tiny_checkpoint, wav_16k, refs_file, tmp_path):
    out_dir = tmp_path / "bundles"
    assert main([str(wav_16k), "--refs", str(refs_file), "--out", str(out_dir),
                 "--model", tiny_checkpoint, "--layers", "4", "--no-final-norm"]) == 0
    manifest = json.loads((out_dir / "clip_16k" / "manifest.json").read_text())
    assert manifest["metadata"]["final_norm"] == "skipped"


def test_refs_parsing_and_missing_reference(tmp_path, tiny_checkpoint, wav_16k):
    refs = read_refs(tmp_path / "refs.tsv") if (tmp_path / "refs.tsv").exists() else None
    assert refs is None
    bad = tmp_path / "bad.tsv"
    bad.write_text("no-tab-here\n")
    with pytest.raises(ValueError, match="filename<TAB>transcript"):
        read_refs(bad)
    empty = tmp_path / "empty.tsv"
    empty.write_text("other.wav\tabc\n")
    code = main([str(wav_16k), "--refs", str(empty), "--out", str(tmp_path / "out"),
                 "--model", tiny_checkpoint, "--layers", "4"])
    assert code == 1


def test_unreadable_audio(tmp_path, tiny_checkpoint, refs_file):
    fake = tmp_path / "clip_16k.wav"
    fake.write_bytes(b"not a wav at all")
    assert main([str(fake), "--refs", str(refs_file), "--out", str(tmp_path / "out"),
                 "--model", tiny_checkpoint, "--layers", "4"]) == 1
