"""WAV reading and writing with normalized float64 sample matrices.

Integer PCM formats map onto [-1, 1) by their nominal full scale (24-bit
data arrives from scipy left-justified in int32 and shares the int32
scale). Float formats pass through unscaled; writing float64 and reading it
back is bit-exact, which downstream language bindings rely on.
"""

from __future__ import annotations

import numpy as np
from scipy.io import wavfile

from .errors import EmptyInputError, LengthMismatchError
from .signals import MultichannelSignal

_INT_SCALES = {
    np.dtype(np.int16): 2.0**15,
    np.dtype(np.int32): 2.0**31,
}


def read_wav(path) -> tuple:
    """Read a WAV file as (sample_rate, samples) with samples (channels, T).

    Supports 16/24/32-bit integer PCM and 32/64-bit float. Raises ValueError
    for unsupported sample formats and propagates I/O errors unchanged.
    """
    rate, data = wavfile.read(path)
    if data.ndim == 1:
        data = data[:, None]
    data = data.T
    if data.dtype in _INT_SCALES:
        samples = data.astype(np.float64) / _INT_SCALES[data.dtype]
    elif data.dtype in (np.float32, np.float64):
        samples = data.astype(np.float64)
    else:
        raise ValueError(f"unsupported WAV sample format: {data.dtype}")
    return int(rate), samples


def write_wav(path, sample_rate: int, samples: np.ndarray, fmt: str = "float64") -> None:
    """Write (channels, T) samples as WAV in the given sample format."""
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError("samples must be 2-D (channels, T)")
    frames = arr.T
    if fmt == "float64":
        out = np.ascontiguousarray(frames)
    elif fmt == "float32":
        out = frames.astype(np.float32)
    elif fmt == "int16":
        scaled = np.clip(frames, -1.0, 1.0 - 1.0 / 32768.0) * 32768.0
        out = np.round(scaled).astype(np.int16)
    else:
        raise ValueError(f"unsupported output format: {fmt}")
    if out.shape[1] == 1:
        out = out[:, 0]
    wavfile.write(path, int(sample_rate), out)


def load_signal_set(paths) -> MultichannelSignal:
    """Load one signal set from one or more WAV files, channels concatenated
    in argument order. All files must agree on sample rate and length."""
    paths = list(paths)
    if not paths:
        raise EmptyInputError("no WAV files given")
    blocks = []
    rate = None
    length = None
    for p in paths:
        r, samples = read_wav(p)
        if rate is None:
            rate, length = r, samples.shape[1]
        else:
            if r != rate:
                raise LengthMismatchError(f"{p} has sample rate {r}, expected {rate}")
            if samples.shape[1] != length:
                raise LengthMismatchError(f"{p} has {samples.shape[1]} samples, expected {length}")
        blocks.append(samples)
    return MultichannelSignal(np.vstack(blocks), float(rate))
