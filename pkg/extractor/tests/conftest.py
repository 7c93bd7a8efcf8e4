from __future__ import annotations

import json

import numpy as np
import pytest
import torch
from scipy.io import wavfile
from transformers import (
    Wav2Vec2Config,
    Wav2Vec2CTCTokenizer,
    Wav2Vec2FeatureExtractor,
    Wav2Vec2ForCTC,
    Wav2Vec2Processor,
)

PHONES = list("abdeikmnostu")
VOCAB = {"<pad>": 0, "<s>": 1, "</s>": 2, "<unk>": 3, "|": 4}
VOCAB.update({phone: 5 + i for i, phone in enumerate(PHONES)})


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory) -> str:
    """A small randomly initialized CTC recognizer saved as a local
    checkpoint: same architecture family and layer-norm layout as the large
    multilingual phoneme models, four transformer blocks."""
    torch.manual_seed(1234)
    config = Wav2Vec2Config(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=4,
        num_attention_heads=2,
        intermediate_size=64,
        conv_dim=(32, 32),
        conv_stride=(4, 4),
        conv_kernel=(8, 8),
        num_conv_pos_embeddings=16,
        num_conv_pos_embedding_groups=4,
        do_stable_layer_norm=True,
        feat_extract_norm="layer",
        pad_token_id=VOCAB["<pad>"],
    )
    model = Wav2Vec2ForCTC(config).eval()
    with torch.no_grad():
        # keep sentence/unknown/word markers out of every argmax so the
        # greedy transcription contains phonemes and blanks only
        suppressed = [VOCAB["<s>"], VOCAB["</s>"], VOCAB["<unk>"], VOCAB["|"]]
        model.lm_head.bias[suppressed] = -100.0

    target = tmp_path_factory.mktemp("tiny_checkpoint")
    vocab_file = target / "vocab.json"
    vocab_file.write_text(json.dumps(VOCAB))
    tokenizer = Wav2Vec2CTCTokenizer(
        str(vocab_file), pad_token="<pad>", bos_token="<s>", eos_token="</s>",
        unk_token="<unk>", word_delimiter_token="|",
    )
    feature_extractor = Wav2Vec2FeatureExtractor(
        feature_size=1, sampling_rate=16_000, padding_value=0.0,
        do_normalize=True, return_attention_mask=False,
    )
    processor = Wav2Vec2Processor(feature_extractor=feature_extractor, tokenizer=tokenizer)
    model.save_pretrained(target)
    processor.save_pretrained(target)
    return str(target)


def synth_wave(seconds: float, rate: int, seed: int = 5, channels: int = 1) -> np.ndarray:
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * rate)) / rate
    wave = (
        0.4 * np.sin(2 * np.pi * 220.0 * t)
        + 0.3 * np.sin(2 * np.pi * 467.0 * t + 0.5)
        + 0.1 * rng.standard_normal(t.shape)
    )
    wave = (wave / np.abs(wave).max() * 0.8 * 32767).astype(np.int16)
    if channels == 2:
        wave = np.stack([wave, np.roll(wave, 7)], axis=1)
    return wave


@pytest.fixture
def wav_16k(tmp_path):
    path = tmp_path / "clip_16k.wav"
    wavfile.write(path, 16_000, synth_wave(0.8, 16_000))
    return path


@pytest.fixture
def wav_8k_stereo(tmp_path):
    path = tmp_path / "clip_8k_stereo.wav"
    wavfile.write(path, 8_000, synth_wave(0.8, 8_000, seed=9, channels=2))
    return path


@pytest.fixture
def refs_file(tmp_path):
    path = tmp_path / "refs.tsv"
    path.write_text("clip_16k.wav\ttamaneka\nclip_8k_stereo.wav\tdomisuna\n")
    return path
