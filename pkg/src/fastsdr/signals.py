"""Core signal containers and evaluation configuration.

Signals are stored as immutable 2-D float arrays of shape (channels,
num_samples). All metric computations operate on unit-normalized channels;
normalization is explicit so callers can opt out when composing pipelines.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .errors import (
    EmptyInputError,
    FilterTooLongError,
    LengthMismatchError,
    ZeroSignalError,
)

VALID_SOLVERS = ("direct", "cgd", "levinson")
VALID_METRICS = ("sdr", "sir", "sar")
VALID_PRECISIONS = ("double", "single")

# Clamp defaults keep cosines strictly inside (0, 1) so the dB map is finite.
CLAMP_EPS_DOUBLE = 1e-12
CLAMP_EPS_SINGLE = 1e-7


@dataclass(frozen=True)
class MultichannelSignal:
    """Immutable multichannel signal, shape (channels, num_samples)."""

    samples: np.ndarray
    sample_rate: float = 16000.0

    def __post_init__(self):
        arr = np.asarray(self.samples)
        if arr.ndim != 2:
            raise ValueError(f"expected 2-D (channels, samples), got ndim={arr.ndim}")
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float64)
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise EmptyInputError(f"signal must have >=1 channel and >=1 sample, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("signal contains non-finite samples")
        if self.sample_rate <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def num_samples(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        return self.num_samples / self.sample_rate

    def astype(self, dtype) -> "MultichannelSignal":
        if self.samples.dtype == np.dtype(dtype):
            return self
        return MultichannelSignal(self.samples.astype(dtype), self.sample_rate)


def as_signal(x, sample_rate: float = 16000.0) -> MultichannelSignal:
    """Coerce an array-like of shape (channels, samples) to a signal."""
    if isinstance(x, MultichannelSignal):
        return x
    return MultichannelSignal(np.asarray(x), sample_rate)


@dataclass(frozen=True)
class EvalConfig:
    """Settings controlling one bss_eval run.

    filter_length is the number of taps L in each distortion filter.
    cgd_tol == 0 selects fixed-iteration mode (exactly cgd_iters iterations
    per system); a positive value stops early at that relative residual.
    clamp_epsilon defaults by precision when left as None.
    """

    filter_length: int = 512
    solver: str = "cgd"
    cgd_iters: int = 10
    cgd_tol: float = 0.0
    precision: str = "double"
    metrics: frozenset = field(default_factory=lambda: frozenset(VALID_METRICS))
    resolve_permutation: bool = True
    clamp_epsilon: float | None = None

    def __post_init__(self):
        if self.filter_length < 1:
            raise ValueError(f"filter_length must be >= 1, got {self.filter_length}")
        if self.solver not in VALID_SOLVERS:
            raise ValueError(f"solver must be one of {VALID_SOLVERS}, got {self.solver!r}")
        if self.cgd_iters < 1:
            raise ValueError(f"cgd_iters must be >= 1, got {self.cgd_iters}")
        if self.cgd_tol < 0:
            raise ValueError(f"cgd_tol must be >= 0, got {self.cgd_tol}")
        if self.precision not in VALID_PRECISIONS:
            raise ValueError(f"precision must be one of {VALID_PRECISIONS}, got {self.precision!r}")
        metrics = frozenset(m.lower() for m in self.metrics)
        bad = metrics - set(VALID_METRICS)
        if bad:
            raise ValueError(f"unknown metrics: {sorted(bad)}")
        if not metrics:
            raise ValueError("metrics must be a nonempty subset of {sdr, sir, sar}")
        object.__setattr__(self, "metrics", metrics)
        if self.clamp_epsilon is not None and not 0 < self.clamp_epsilon < 0.5:
            raise ValueError(f"clamp_epsilon must lie in (0, 0.5), got {self.clamp_epsilon}")

    @property
    def dtype(self):
        return np.float64 if self.precision == "double" else np.float32

    @property
    def clamp(self) -> float:
        if self.clamp_epsilon is not None:
            return self.clamp_epsilon
        return CLAMP_EPS_DOUBLE if self.precision == "double" else CLAMP_EPS_SINGLE

    def with_metrics(self, metrics: Iterable[str]) -> "EvalConfig":
        return replace(self, metrics=frozenset(metrics))


def normalize_unit_norm(
    signal: MultichannelSignal | np.ndarray, role: str = "signal"
) -> MultichannelSignal:
    """Scale each channel to unit Euclidean norm.

    Norms are accumulated in float64 regardless of storage precision. A
    channel of zero energy raises ZeroSignalError since its direction is
    undefined; role only labels that error.
    """
    sig = as_signal(signal)
    norms = np.linalg.norm(sig.samples.astype(np.float64, copy=False), axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroSignalError(int(zero[0]), role)
    scaled = sig.samples / norms[:, None].astype(sig.samples.dtype)
    return MultichannelSignal(scaled, sig.sample_rate)


def validate_pairing(
    references: MultichannelSignal,
    estimates: MultichannelSignal,
    filter_length: int,
) -> None:
    """Check that a reference/estimate pair is evaluable at this filter length."""
    refs = as_signal(references)
    ests = as_signal(estimates)
    if refs.num_samples != ests.num_samples:
        raise LengthMismatchError(
            f"references have {refs.num_samples} samples, estimates have {ests.num_samples}"
        )
    if refs.num_samples <= filter_length:
        raise FilterTooLongError(
            f"signals must be longer than the filter: num_samples={refs.num_samples}, "
            f"filter_length={filter_length}"
        )
