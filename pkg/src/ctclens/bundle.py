"""Layer logit bundles: the on-disk unit handed from a model extractor (or the
synthetic generator) to the analysis pipeline.

A bundle is a directory holding one binary matrix file per encoder layer plus a
``manifest.json``:

    <bundle_dir>/
        manifest.json
        layer_24.llb
        layer_23.llb
        ...

Matrix file layout (all integers little-endian):

    bytes 0..3    magic ``LLB1``
    bytes 4..7    format version, u32 (currently 1)
    bytes 8..11   frame count T, u32
    bytes 12..15  vocabulary size V, u32
    bytes 16..    T*V float32 values, row-major (frame-major)

``manifest.json`` is UTF-8 (no BOM) with keys ``utterance_id``, ``vocab``,
``blank_id``, ``reference`` (raw transcription text), ``tokenizer``
(``chars`` or ``sampa-length``), ``layers`` (list of ``{index, file, frames}``)
and ``metadata`` (string-to-string).

Bundles are immutable once loaded; reading distinct bundles from several
threads is safe.  Writing is single-writer per path.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

MAGIC = b"LLB1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIII")

TOKENIZER_MODES = ("chars", "sampa-length")
LENGTH_MARK = ":"


class BundleFormatError(ValueError):
    """A bundle on disk does not conform to the documented layout."""


def tokenize(raw: str, mode: str = "chars") -> "PhonemeSequence":
    """Split a raw transcription string into phoneme tokens.

    ``chars`` makes every Unicode scalar its own token.  ``sampa-length`` is
    identical except that a length mark ``:`` attaches to the preceding token,
    so ``e:`` comes out as one token.  Concatenating the tokens always
    reproduces ``raw``.
    """
    if mode not in TOKENIZER_MODES:
        raise ValueError(f"unknown tokenizer mode {mode!r}; expected one of {TOKENIZER_MODES}")
    if any(ch.isspace() for ch in raw):
        raise ValueError("transcription contains whitespace; tokens must be non-blank")
    if mode == "chars":
        return PhonemeSequence(tuple(raw))
    tokens: list[str] = []
    for ch in raw:
        if ch == LENGTH_MARK:
            if not tokens:
                raise ValueError("length mark ':' with no preceding token")
            tokens[-1] += ch
        else:
            tokens.append(ch)
    return PhonemeSequence(tuple(tokens))


def retokenize(seq: "PhonemeSequence", mode: str) -> "PhonemeSequence":
    """Re-split an existing sequence under a different tokenizer mode."""
    return tokenize(seq.text, mode)


@dataclass(frozen=True)
class PhonemeSequence(Sequence[str]):
    """An ordered sequence of phoneme tokens (reference or hypothesis)."""

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        for tok in self.tokens:
            if tok == "":
                raise ValueError("PhonemeSequence.tokens: empty token")

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, index):  # noqa: ANN001 - Sequence protocol
        if isinstance(index, slice):
            return PhonemeSequence(self.tokens[index])
        return self.tokens[index]

    def __iter__(self) -> Iterator[str]:
        return iter(self.tokens)

    @property
    def text(self) -> str:
        """The raw transcription: tokens concatenated back together."""
        return "".join(self.tokens)


@dataclass(eq=False)
class LayerLogitBundle:
    """Per-layer logit matrices plus everything needed to score an utterance.

    ``layers`` is an ordered list of ``(layer_index, logits)`` pairs; pairs
    are sorted by index at construction (duplicates rejected) and every
    matrix is T frames by V vocabulary entries, normalised to little-endian
    float32.
    """

    utterance_id: str
    layers: list[tuple[int, np.ndarray]]
    vocab: list[str]
    blank_id: int
    reference: PhonemeSequence
    tokenizer: str = "chars"
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.layers = sorted(
            (
                (int(index), np.ascontiguousarray(np.asarray(m), dtype="<f4"))
                for index, m in self.layers
            ),
            key=lambda pair: pair[0],
        )
        self.vocab = list(self.vocab)
        self.metadata = dict(self.metadata)
        self.validate()

    def validate(self) -> None:
        """Raise ``ValueError`` naming the offending field on any invariant break."""
        vocab_size = len(self.vocab)
        if not 0 <= self.blank_id < vocab_size:
            raise ValueError(f"blank_id: {self.blank_id} out of range for vocabulary of {vocab_size}")
        indices = [index for index, _ in self.layers]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise ValueError(f"layers: indices must be strictly increasing, got {indices}")
        shapes = {m.shape for _, m in self.layers}
        if len(shapes) > 1:
            raise ValueError(f"layers: matrices disagree on shape: {sorted(shapes)}")
        for index, m in self.layers:
            if m.ndim != 2:
                raise ValueError(f"layers: layer {index} is not a 2-D matrix")
            if m.shape[1] != vocab_size:
                raise ValueError(
                    f"layers: layer {index} has {m.shape[1]} columns but vocab has {vocab_size} entries"
                )
        if self.tokenizer not in TOKENIZER_MODES:
            raise ValueError(f"tokenizer: unknown mode {self.tokenizer!r}")
        blank_token = self.vocab[self.blank_id]
        for tok in self.reference:
            if tok == blank_token:
                raise ValueError(f"reference: contains the blank token {blank_token!r}")
        # The manifest stores the reference as raw text, so its tokenization
        # must be reproducible from that text or the bundle cannot round-trip.
        if tokenize(self.reference.text, self.tokenizer) != self.reference:
            raise ValueError(
                f"reference: token boundaries are not reproducible under the "
                f"{self.tokenizer!r} tokenizer"
            )

    @property
    def layer_indices(self) -> list[int]:
        return [index for index, _ in self.layers]

    def logits_for(self, layer_index: int) -> np.ndarray:
        for index, m in self.layers:
            if index == layer_index:
                return m
        raise KeyError(f"layer {layer_index} not in bundle (available: {self.layer_indices})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LayerLogitBundle):
            return NotImplemented
        return (
            self.utterance_id == other.utterance_id
            and self.vocab == other.vocab
            and self.blank_id == other.blank_id
            and self.reference == other.reference
            and self.tokenizer == other.tokenizer
            and self.metadata == other.metadata
            and self.layer_indices == other.layer_indices
            and all(np.array_equal(a, b) for (_, a), (_, b) in zip(self.layers, other.layers))
        )


def _layer_filename(index: int) -> str:
    return f"layer_{index}.llb"


def write_matrix(path: Path, logits: np.ndarray) -> None:
    m = np.ascontiguousarray(np.asarray(logits), dtype="<f4")
    frames, vocab_size = m.shape
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, frames, vocab_size))
        fh.write(m.tobytes())


def read_matrix(path: Path) -> np.ndarray:
    with open(path, "rb") as fh:
        head = fh.read(HEADER.size)
        if len(head) < HEADER.size:
            raise BundleFormatError(f"{path}: truncated header ({len(head)} bytes)")
        magic, version, frames, vocab_size = HEADER.unpack(head)
        if magic != MAGIC:
            raise BundleFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise BundleFormatError(f"{path}: unsupported format version {version}")
        payload = fh.read(4 * frames * vocab_size)
    if len(payload) != 4 * frames * vocab_size:
        raise BundleFormatError(
            f"{path}: truncated payload, expected {4 * frames * vocab_size} bytes, got {len(payload)}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(frames, vocab_size)


def write_bundle(bundle: LayerLogitBundle, path: str | Path) -> None:
    """Write ``bundle`` as a directory at ``path`` (parent must exist)."""
    bundle.validate()
    root = Path(path)
    root.mkdir(exist_ok=True)
    entries = []
    for index, m in bundle.layers:
        name = _layer_filename(index)
        write_matrix(root / name, m)
        entries.append({"index": index, "file": name, "frames": int(m.shape[0])})
    manifest = {
        "utterance_id": bundle.utterance_id,
        "vocab": bundle.vocab,
        "blank_id": bundle.blank_id,
        "reference": bundle.reference.text,
        "tokenizer": bundle.tokenizer,
        "layers": entries,
        "metadata": bundle.metadata,
    }
    with open(root / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2)
        fh.write("\n")


def read_bundle(path: str | Path) -> LayerLogitBundle:
    """Load a bundle directory written by :func:`write_bundle` (or any tool
    emitting the documented layout); values round-trip bit-exactly."""
    root = Path(path)
    manifest_path = root / "manifest.json"
    try:
        with open(manifest_path, encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise BundleFormatError(f"{manifest_path}: no manifest found") from None
    except json.JSONDecodeError as exc:
        raise BundleFormatError(f"{manifest_path}: invalid JSON ({exc})") from None

    for key in ("utterance_id", "vocab", "blank_id", "reference", "layers"):
        if key not in manifest:
            raise BundleFormatError(f"{manifest_path}: missing key {key!r}")
    mode = manifest.get("tokenizer", "chars")
    layers: list[tuple[int, np.ndarray]] = []
    for entry in manifest["layers"]:
        layer_path = root / entry["file"]
        if not layer_path.exists():
            raise BundleFormatError(f"{layer_path}: referenced by manifest but missing")
        m = read_matrix(layer_path)
        if m.shape[0] != entry["frames"]:
            raise BundleFormatError(
                f"{layer_path}: manifest declares {entry['frames']} frames but header says {m.shape[0]}"
            )
        if m.shape[1] != len(manifest["vocab"]):
            raise BundleFormatError(
                f"{layer_path}: header vocabulary size {m.shape[1]} != manifest vocab length "
                f"{len(manifest['vocab'])}"
            )
        layers.append((int(entry["index"]), m))
    return LayerLogitBundle(
        utterance_id=manifest["utterance_id"],
        layers=layers,
        vocab=manifest["vocab"],
        blank_id=int(manifest["blank_id"]),
        reference=tokenize(manifest["reference"], mode),
        tokenizer=mode,
        metadata=dict(manifest.get("metadata", {})),
    )


def discover_bundles(corpus_dir: str | Path) -> list[Path]:
    """Bundle directories directly under ``corpus_dir`` (those with a manifest)."""
    root = Path(corpus_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"{root}: not a directory")
    return sorted(p.parent for p in root.glob("*/manifest.json"))


def load_corpus(corpus_dir: str | Path) -> list[LayerLogitBundle]:
    paths = discover_bundles(corpus_dir)
    if not paths:
        raise BundleFormatError(f"{corpus_dir}: no bundle directories (manifest.json) found")
    return [read_bundle(p) for p in paths]
