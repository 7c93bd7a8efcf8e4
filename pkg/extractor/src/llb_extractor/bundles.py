"""Writer for the layer logit bundle format.

A bundle directory pairs one binary matrix file per layer with a
``manifest.json``.  Matrix files are ``LLB1`` | version u32 | T u32 | V u32
(little-endian) followed by T*V float32 values, row-major.  This module
implements the format directly so the extractor has no dependency on the
analysis package that consumes it.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"LLB1"
FORMAT_VERSION = 1
HEADER = struct.Struct("<4sIII")


def write_matrix(path: Path, logits: np.ndarray) -> None:
    m = np.ascontiguousarray(np.asarray(logits), dtype="<f4")
    if m.ndim != 2:
        raise ValueError(f"{path}: logits must be 2-D, got shape {m.shape}")
    with open(path, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, FORMAT_VERSION, m.shape[0], m.shape[1]))
        fh.write(m.tobytes())


def write_bundle(
    path: str | Path,
    utterance_id: str,
    layers: list[tuple[int, np.ndarray]],
    vocab: list[str],
    blank_id: int,
    reference: str,
    tokenizer: str = "chars",
    metadata: dict[str, str] | None = None,
) -> Path:
    """Write one bundle directory; layer indices must be strictly increasing."""
    indices = [index for index, _ in layers]
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValueError(f"layer indices must be strictly increasing, got {indices}")
    if not 0 <= blank_id < len(vocab):
        raise ValueError(f"blank_id {blank_id} out of range for vocabulary of {len(vocab)}")
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    entries = []
    for index, m in layers:
        name = f"layer_{index}.llb"
        write_matrix(root / name, m)
        entries.append({"index": index, "file": name, "frames": int(np.asarray(m).shape[0])})
    manifest = {
        "utterance_id": utterance_id,
        "vocab": list(vocab),
        "blank_id": int(blank_id),
        "reference": reference,
        "tokenizer": tokenizer,
        "layers": entries,
        "metadata": dict(metadata or {}),
    }
    with open(root / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    return root
