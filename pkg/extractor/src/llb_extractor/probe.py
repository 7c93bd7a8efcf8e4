"""Per-layer logit extraction from wav2vec2-style CTC checkpoints.

Layer indexing: layer L means "output of transformer block L", counting
blocks from 1 and excluding the convolutional feature encoder, so on a
24-block checkpoint the final layer is 24 and removing the top two layers
means probing layer 22.  One forward pass with hidden states retained serves
every requested layer: a block's output does not depend on the blocks above
it, so this is identical to truncating the encoder.

Checkpoints trained with a final encoder layer norm (``do_stable_layer_norm``)
apply that norm only after the last block.  When probing intermediate layers
the norm is applied to their hidden states too by default, for parity with
how the final layer reaches the projection head; ``apply_final_norm=False``
probes the raw block outputs instead.  The choice is recorded in bundle
metadata either way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from transformers import Wav2Vec2ForCTC, Wav2Vec2Processor

DEFAULT_MODEL = "facebook/wav2vec2-xlsr-53-espeak-cv-ft"


@dataclass(frozen=True)
class Recognizer:
    model: Wav2Vec2ForCTC
    processor: Wav2Vec2Processor

    @property
    def num_layers(self) -> int:
        return self.model.config.num_hidden_layers

    @property
    def blank_id(self) -> int:
        return int(self.model.config.pad_token_id)

    def vocab(self) -> list[str]:
        # the CTC head width is authoritative: tokenizer entries past it
        # (added tokens) can never be predicted and do not belong in bundles
        size = int(self.model.config.vocab_size)
        out = [f"<unused_{i}>" for i in range(size)]
        for token, token_id in self.processor.tokenizer.get_vocab().items():
            if token_id < size:
                out[token_id] = token
        return out

    def default_layers(self, count: int = 6) -> list[int]:
        # top `count` blocks, deepest first: 24..19 on a 24-block checkpoint
        top = self.num_layers
        return list(range(top, max(top - count, 0), -1))


def load_recognizer(model_name_or_path: str = DEFAULT_MODEL) -> Recognizer:
    model = Wav2Vec2ForCTC.from_pretrained(model_name_or_path).eval()
    processor = Wav2Vec2Processor.from_pretrained(model_name_or_path)
    return Recognizer(model=model, processor=processor)


def _prepare_inputs(recognizer: Recognizer, waveform: np.ndarray) -> torch.Tensor:
    features = recognizer.processor(
        waveform, sampling_rate=16_000, return_tensors="pt", padding=False
    )
    return features.input_values


def layer_logits(
    recognizer: Recognizer,
    waveform: np.ndarray,
    layers: list[int],
    apply_final_norm: bool = True,
) -> dict[int, np.ndarray]:
    """Project the requested blocks' hidden states through the CTC head.

    Returns layer index -> (frames, vocab) float32 logits.  Raises on layer
    indices outside 1..num_layers.
    """
    top = recognizer.num_layers
    bad = [layer for layer in layers if not 1 <= layer <= top]
    if bad:
        raise ValueError(f"layer index out of range for this checkpoint: {bad} (valid: 1..{top})")

    model = recognizer.model
    inputs = _prepare_inputs(recognizer, waveform)
    with torch.no_grad():
        outputs = model(inputs, output_hidden_states=True)
        hidden_states = outputs.hidden_states  # [0]=pre-transformer, [L]=block L output
        final_norm = (
            model.wav2vec2.encoder.layer_norm
            if model.config.do_stable_layer_norm
            else None
        )
        produced: dict[int, np.ndarray] = {}
        for layer in sorted(set(layers)):
            states = hidden_states[layer]
            if final_norm is not None and apply_final_norm and layer != top:
                # the last entry already carries the final norm
                states = final_norm(states)
            logits = model.lm_head(states)
            produced[layer] = logits[0].cpu().numpy().astype(np.float32)
    return produced


def native_transcription(recognizer: Recognizer, waveform: np.ndarray) -> str:
    """The checkpoint's own end-to-end greedy transcription (parity anchor)."""
    inputs = _prepare_inputs(recognizer, waveform)
    with torch.no_grad():
        logits = recognizer.model(inputs).logits
    predicted = torch.argmax(logits, dim=-1)
    return recognizer.processor.batch_decode(predicted)[0]
