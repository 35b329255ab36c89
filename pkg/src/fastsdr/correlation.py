"""FFT-based correlation statistics shared by every solver path.

For references s_1..s_K and estimates shat_1..shat_M of length T and a
filter length L, two arrays summarize everything the metric pipeline needs:

  acf[k, l, L-1+t] = sum_n s_k[n] * s_l[n+t]    for lags t = -(L-1)..L-1
  xcorr[k, m, t]   = sum_n s_k[n] * shat_m[n+t] for lags t = 0..L-1

acf[k, l] generates block (k, l) of the Gram matrix of all shifted
references: dense entry (i, j) equals acf[k, l, L-1 + i - j]. xcorr[k, m]
is the projection right-hand side for estimate m onto shifts of s_k.

Everything is computed with one real FFT per channel on a padded length
N >= T + L - 1 chosen for FFT efficiency; pairwise products in the
frequency domain then invert back. Accumulation is float64 irrespective of
the requested storage dtype.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .signals import MultichannelSignal, as_signal


@dataclass(frozen=True)
class CorrelationSet:
    """Correlation statistics for one reference/estimate pairing.

    acf has shape (K, K, 2L-1) with lags ascending, zero lag at index L-1.
    xcorr has shape (K, M, L) with lags 0..L-1. est_energy holds the
    squared norm of each estimate channel, needed to turn filter solutions
    into energy fractions without assuming exact unit normalization.
    """

    acf: np.ndarray
    xcorr: np.ndarray
    est_energy: np.ndarray
    filter_length: int
    num_samples: int

    def __post_init__(self):
        K = self.acf.shape[0]
        L = self.filter_length
        if self.acf.shape != (K, K, 2 * L - 1):
            raise ValueError(f"acf shape {self.acf.shape} inconsistent with L={L}")
        if self.xcorr.shape[0] != K or self.xcorr.shape[2] != L:
            raise ValueError(f"xcorr shape {self.xcorr.shape} inconsistent with acf")
        if self.est_energy.shape != (self.xcorr.shape[1],):
            raise ValueError(f"est_energy shape {self.est_energy.shape} inconsistent with xcorr")

    @property
    def num_references(self) -> int:
        return self.acf.shape[0]

    @property
    def num_estimates(self) -> int:
        return self.xcorr.shape[1]

    def toeplitz_column(self, k: int) -> np.ndarray:
        """First column of the (symmetric) Gram block (k, k): lags 0..L-1."""
        return self.acf[k, k, self.filter_length - 1 :]


def compute_correlations(
    references: MultichannelSignal | np.ndarray,
    estimates: MultichannelSignal | np.ndarray,
    filter_length: int,
    *,
    dtype=np.float64,
    workers: int = 1,
) -> CorrelationSet:
    """Compute all reference auto/cross correlations needed for evaluation.

    workers is forwarded to scipy.fft; results are deterministic for a fixed
    worker count and agree across worker counts to rounding error.
    """
    refs = as_signal(references).samples.astype(np.float64, copy=False)
    ests = as_signal(estimates).samples.astype(np.float64, copy=False)
    K, T = refs.shape
    M = ests.shape[0]
    L = int(filter_length)
    if not 1 <= L:
        raise ValueError(f"filter_length must be >= 1, got {L}")

    N = sfft.next_fast_len(T + L - 1, real=True)
    ref_spec = sfft.rfft(refs, N, axis=-1, workers=workers)
    est_spec = sfft.rfft(ests, N, axis=-1, workers=workers)

    acf = np.empty((K, K, 2 * L - 1), dtype=np.float64)
    for k in range(K):
        # one inverse FFT covers blocks (k, k..K-1); (l, k) is the lag reversal
        prod = np.conj(ref_spec[k : k + 1]) * ref_spec[k:]
        full = sfft.irfft(prod, N, axis=-1, workers=workers)
        for off, l in enumerate(range(k, K)):
            row = full[off]
            if L > 1:
                acf[k, l, : L - 1] = row[N - (L - 1) :]
            acf[k, l, L - 1 :] = row[:L]
            if l == k:
                # lag t and -t are the same sum; averaging removes the FFT
                # rounding skew so the diagonal blocks are exactly symmetric
                acf[k, k] = 0.5 * (acf[k, k] + acf[k, k, ::-1])
            else:
                acf[l, k] = acf[k, l, ::-1]

    prod = np.conj(ref_spec[:, None, :]) * est_spec[None, :, :]
    xcorr = sfft.irfft(prod, N, axis=-1, workers=workers)[..., :L].copy()

    return CorrelationSet(
        acf=acf.astype(dtype, copy=False),
        xcorr=xcorr.astype(dtype, copy=False),
        est_energy=np.einsum("mt,mt->m", ests, ests),
        filter_length=L,
        num_samples=T,
    )
