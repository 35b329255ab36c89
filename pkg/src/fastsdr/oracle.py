"""Dense reference implementations used to validate the fast paths.

Everything here works with explicit shift matrices and dense projections,
deliberately avoiding the FFT and iterative machinery it is meant to check.
The only shared ingredients are the diagonal-loading constant and the
clamped dB map, so both paths describe the same regularized problem.

Sizes are capped: these routines allocate O((T+L)^2) memory and exist for
tests, fixtures, and synthetic data generation, not for production use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import SingularGramError, SizeCapError
from .metrics import clamp_unit, db_map
from .signals import MultichannelSignal, as_signal
from .solvers import default_loading

SIZE_CAP = 4096


def _check_cap(*dims: int) -> None:
    for d in dims:
        if d > SIZE_CAP:
            raise SizeCapError(f"dense oracle size {d} exceeds cap {SIZE_CAP}")


def shift_matrix(channel: np.ndarray, filter_length: int) -> np.ndarray:
    """Dense (T+L-1) x L matrix whose column j is the channel delayed by j."""
    s = np.asarray(channel, dtype=np.float64)
    if s.ndim != 1:
        raise ValueError("channel must be 1-D")
    T, L = s.size, int(filter_length)
    _check_cap(T + L - 1)
    A = np.zeros((T + L - 1, L))
    for j in range(L):
        A[j : j + T, j] = s
    return A


def _stacked_shift(refs: np.ndarray, L: int) -> np.ndarray:
    K, T = refs.shape
    _check_cap(T + L - 1, K * L)
    return np.hstack([shift_matrix(refs[k], L) for k in range(K)])


def _loaded_gram_solve(A: np.ndarray, lam: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve (A^T A + diag(lam)) x = rhs with a dense Cholesky factorization."""
    G = A.T @ A
    G[np.diag_indices_from(G)] += lam
    try:
        factor = sla.cho_factor(G, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularGramError(f"dense Gram factorization failed: {exc}") from None
    return sla.cho_solve(factor, rhs)


def build_projections(
    references: MultichannelSignal | np.ndarray, filter_length: int
) -> tuple[list, np.ndarray]:
    """Dense orthogonal projections onto shifted-reference subspaces.

    Returns ([P_1..P_K], P) where P_k projects onto the span of the L shifts
    of reference k and P onto the span of all K*L shifted references. The
    Gram matrices are regularized with the same loading as the fast solver
    path, so P is idempotent and symmetric only up to that loading.
    """
    refs = as_signal(references).samples.astype(np.float64, copy=False)
    K, T = refs.shape
    L = int(filter_length)
    per_k = []
    lams = np.empty(K)
    for k in range(K):
        A = shift_matrix(refs[k], L)
        lam = default_loading(float(refs[k] @ refs[k]), L)
        lams[k] = lam
        per_k.append(A @ _loaded_gram_solve(A, np.full(L, lam), A.T))
    A_all = _stacked_shift(refs, L)
    P = A_all @ _loaded_gram_solve(A_all, np.repeat(lams, L), A_all.T)
    return per_k, P


@dataclass(frozen=True)
class Decomposition:
    """Split of one padded estimate against one reference channel.

    s_target + e_interf + e_artif reconstructs the zero-padded estimate
    exactly (up to float addition).
    """

    s_target: np.ndarray
    e_interf: np.ndarray
    e_artif: np.ndarray

    @property
    def estimate(self) -> np.ndarray:
        return self.s_target + self.e_interf + self.e_artif


def decompose(
    references: MultichannelSignal | np.ndarray,
    estimate: np.ndarray,
    filter_length: int,
) -> list:
    """Project one estimate channel against every reference subspace.

    Returns one Decomposition per reference k: s_target is the projection
    onto shifts of reference k, e_interf moves it to the projection onto all
    references, e_artif is the residual outside that span.
    """
    refs = as_signal(references).samples.astype(np.float64, copy=False)
    est = np.asarray(estimate, dtype=np.float64)
    if est.ndim != 1 or est.size != refs.shape[1]:
        raise ValueError("estimate must be 1-D with the same length as the references")
    K, T = refs.shape
    L = int(filter_length)
    _check_cap(T + L - 1, K * L)

    padded = np.concatenate([est, np.zeros(L - 1)])
    A_all = _stacked_shift(refs, L)
    lams = np.array([default_loading(float(refs[k] @ refs[k]), L) for k in range(K)])
    g = _loaded_gram_solve(A_all, np.repeat(lams, L), A_all.T @ padded)
    p_all = A_all @ g

    out = []
    for k in range(K):
        A = shift_matrix(refs[k], L)
        h = _loaded_gram_solve(A, np.full(L, lams[k]), A.T @ padded)
        p_k = A @ h
        out.append(Decomposition(s_target=p_k, e_interf=p_all - p_k, e_artif=padded - p_all))
    return out


def metrics_via_decomposition(dec: Decomposition, clamp_epsilon: float = 1e-12) -> tuple:
    """(sdr, sir, sar) in dB from one decomposition.

    Each ratio is formed as an energy fraction u / (u + v), clamped exactly
    like the fast path, then mapped through x -> 10 log10(x / (1 - x)).
    This keeps the oracle scale-free and comparable to the cosine pipeline
    at tight tolerances.
    """
    t = float(dec.s_target @ dec.s_target)
    ei = dec.e_interf
    ea = dec.e_artif
    e_total = ei + ea
    proj = dec.s_target + ei

    sdr_frac = t / (t + float(e_total @ e_total))
    sir_frac = t / (t + float(ei @ ei))
    p = float(proj @ proj)
    sar_frac = p / (p + float(ea @ ea))

    vals = clamp_unit(np.array([sdr_frac, sir_frac, sar_frac]), clamp_epsilon)
    sdr, sir, sar = (float(x) for x in db_map(vals))
    return sdr, sir, sar


@dataclass(frozen=True)
class MixtureSpec:
    """Recipe for synthesizing estimates from references.

    Each estimate m is sum_k gains[m, k] * (filters[m, k] * s_k) + noise_m,
    convolution truncated to the reference length. Unset fields are drawn
    from the seeded generator: random short filters, gains favoring the
    diagonal pairing, and white noise with relative scale noise_scale.
    """

    num_estimates: int
    filter_taps: int = 8
    filters: np.ndarray | None = None
    gains: np.ndarray | None = None
    noise: np.ndarray | None = None
    noise_scale: float = 0.05

    def __post_init__(self):
        if self.num_estimates < 1:
            raise ValueError("num_estimates must be >= 1")
        if self.filter_taps < 1:
            raise ValueError("filter_taps must be >= 1")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be >= 0")


def generate_mixture(
    references: MultichannelSignal | np.ndarray,
    mix: MixtureSpec,
    seed: int = 0,
) -> MultichannelSignal:
    """Filter-and-sum synthetic estimates for testing and benchmarks."""
    sig = as_signal(references)
    refs = sig.samples.astype(np.float64, copy=False)
    K, T = refs.shape
    M = mix.num_estimates
    taps = mix.filter_taps
    if taps > max(1, T // 2):
        raise ValueError(f"filter_taps={taps} is not short relative to T={T}")

    rng = np.random.default_rng(seed)
    filters = mix.filters
    if filters is None:
        filters = rng.standard_normal((M, K, taps)) / np.sqrt(taps)
    else:
        filters = np.asarray(filters, dtype=np.float64)
        if filters.shape[:2] != (M, K):
            raise ValueError(f"filters must have shape (M, K, taps), got {filters.shape}")
    gains = mix.gains
    if gains is None:
        gains = np.full((M, K), 0.3)
        for m in range(M):
            gains[m, m % K] = 1.0
    else:
        gains = np.asarray(gains, dtype=np.float64)
        if gains.shape != (M, K):
            raise ValueError(f"gains must have shape (M, K), got {gains.shape}")

    noise = mix.noise
    if noise is None:
        level = mix.noise_scale * float(np.mean(np.linalg.norm(refs, axis=1))) / np.sqrt(T)
        noise = level * rng.standard_normal((M, T))
    else:
        noise = np.asarray(noise, dtype=np.float64)
        if noise.shape != (M, T):
            raise ValueError(f"noise must have shape (M, T), got {noise.shape}")

    ests = np.empty((M, T))
    for m in range(M):
        acc = noise[m].copy()
        # direct convolution keeps single-tap identity filters exact
        for k in range(K):
            acc += gains[m, k] * np.convolve(refs[k], filters[m, k])[:T]
        ests[m] = acc
    return MultichannelSignal(ests, sig.sample_rate)
