"""WAV loading: any PCM/float wav in, float32 mono at the target rate out."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

TARGET_RATE = 16_000

_INT_SCALES = {np.dtype(np.int16): 2**15, np.dtype(np.int32): 2**31}


def load_waveform(path: str | Path, target_rate: int = TARGET_RATE) -> tuple[np.ndarray, float]:
    """Read a wav file as float32 mono at ``target_rate``.

    Returns (waveform, original duration in seconds).  Stereo input is
    averaged to mono; integer PCM is rescaled to [-1, 1]; other sample rates
    are polyphase-resampled.
    """
    path = Path(path)
    try:
        rate, data = wavfile.read(path)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise ValueError(f"unreadable audio file {path}: {exc}") from exc
    if data.size == 0:
        raise ValueError(f"unreadable audio file {path}: empty waveform")

    if data.dtype in _INT_SCALES:
        samples = data.astype(np.float32) / _INT_SCALES[data.dtype]
    elif data.dtype == np.uint8:
        samples = (data.astype(np.float32) - 128.0) / 128.0
    else:
        samples = data.astype(np.float32)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)

    duration = len(samples) / rate
    if rate != target_rate:
        divisor = math.gcd(rate, target_rate)
        samples = resample_poly(samples, target_rate // divisor, rate // divisor).astype(np.float32)
    return samples, duration
