"""Structured linear solvers for Toeplitz and block-Toeplitz systems.

Operators are immutable and cache the circulant-embedding spectra that make
their matvecs O(L log L). Preconditioners are the Frobenius-closest
circulants (diagonal averaging of the dense matrix), applied per FFT bin;
for block systems each frequency bin carries a K x K matrix that is
factored once at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft
import scipy.linalg as sla

from .errors import (
    BreakdownError,
    LevinsonBreakdownError,
    NonPositivePreconditionerError,
    SingularSystemError,
)

# Relative diagonal bumps tried by the dense path before giving up.
_DENSE_BUMPS = (0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6)


def default_loading(scale: float, filter_length: int, dtype=np.float64) -> float:
    """Diagonal loading added to the zero-lag term of every system.

    Proportional to the zero-lag autocorrelation so it is scale-free, with a
    floor at machine epsilon for the working dtype. Every solver path and
    the dense reference oracle must share this value, otherwise they invert
    different matrices and cannot agree to tight tolerances.
    """
    eps = float(np.finfo(np.dtype(dtype)).eps)
    return float(scale) * max(eps, 1e-10 * filter_length)


def _embedding_length(L: int) -> int:
    return sfft.next_fast_len(max(2 * L - 1, 1), real=True)


def _embed_two_sided(seq: np.ndarray, L: int, n: int) -> np.ndarray:
    """Circulant embedding of a Toeplitz block from its two-sided lag sequence.

    seq holds lags -(L-1)..L-1 ascending. The circulant first column carries
    nonnegative lags in 0..L-1 and negative lags wrapped at the tail.
    """
    emb = np.zeros(n)
    emb[:L] = seq[L - 1 :]
    if L > 1:
        emb[n - (L - 1) :] = seq[: L - 1]
    return emb


@dataclass(frozen=True)
class SymmetricToeplitz:
    """Symmetric Toeplitz operator defined by its first column."""

    first_column: np.ndarray

    def __post_init__(self):
        col = np.asarray(self.first_column, dtype=np.float64)
        if col.ndim != 1 or col.size < 1:
            raise ValueError("first_column must be a nonempty 1-D array")
        col = col.copy()
        col.setflags(write=False)
        object.__setattr__(self, "first_column", col)

    @property
    def order(self) -> int:
        return self.first_column.size

    @property
    def shape(self) -> tuple:
        return (self.order, self.order)

    @cached_property
    def _spectrum(self) -> np.ndarray:
        L = self.order
        n = _embedding_length(L)
        seq = np.concatenate([self.first_column[1:][::-1], self.first_column])
        return sfft.rfft(_embed_two_sided(seq, L, n), n)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        L = self.order
        n = _embedding_length(L)
        v = np.asarray(v, dtype=np.float64)
        spec = sfft.rfft(v, n, axis=-1)
        return sfft.irfft(spec * self._spectrum, n, axis=-1)[..., :L]

    def to_dense(self) -> np.ndarray:
        return sla.toeplitz(self.first_column)

    def loaded(self, amount: float) -> "SymmetricToeplitz":
        col = self.first_column.copy()
        col[0] += amount
        return SymmetricToeplitz(col)


@dataclass(frozen=True)
class BlockToeplitz:
    """Symmetric block matrix whose (k, l) block is Toeplitz.

    sequences has shape (K, K, 2L-1); sequences[k, l] holds the two-sided
    lag sequence generating block (k, l), so global symmetry requires
    sequences[l, k] == sequences[k, l][::-1].
    """

    sequences: np.ndarray

    def __post_init__(self):
        seq = np.asarray(self.sequences, dtype=np.float64)
        if seq.ndim != 3 or seq.shape[0] != seq.shape[1] or seq.shape[2] % 2 == 0:
            raise ValueError(f"sequences must have shape (K, K, 2L-1), got {seq.shape}")
        if not np.allclose(seq, seq[..., ::-1].transpose(1, 0, 2), rtol=1e-10, atol=0.0):
            raise ValueError("sequences do not describe a symmetric block matrix")
        seq = seq.copy()
        seq.setflags(write=False)
        object.__setattr__(self, "sequences", seq)

    @property
    def num_blocks(self) -> int:
        return self.sequences.shape[0]

    @property
    def block_order(self) -> int:
        return (self.sequences.shape[2] + 1) // 2

    @property
    def order(self) -> int:
        return self.num_blocks * self.block_order

    @property
    def shape(self) -> tuple:
        return (self.order, self.order)

    @cached_property
    def _spectra(self) -> np.ndarray:
        K, L = self.num_blocks, self.block_order
        n = _embedding_length(L)
        emb = np.empty((K, K, n))
        for k in range(K):
            for l in range(K):
                emb[k, l] = _embed_two_sided(self.sequences[k, l], L, n)
        return sfft.rfft(emb, n, axis=-1)

    def matvec(self, v: np.ndarray) -> np.ndarray:
        K, L = self.num_blocks, self.block_order
        n = _embedding_length(L)
        flat = v.ndim == 1
        V = np.asarray(v, dtype=np.float64).reshape(K, L)
        if K == 1:
            # 1-D arrays keep one-block systems bitwise identical to
            # SymmetricToeplitz.matvec; einsum and batched ufunc loops round
            # complex products differently
            spec = sfft.rfft(V[0], n)
            out = sfft.irfft(spec * self._spectra[0, 0], n)[:L]
            return out if flat else out[None, :]
        spec = sfft.rfft(V, n, axis=-1)
        out_spec = np.einsum("klf,lf->kf", self._spectra, spec)
        out = sfft.irfft(out_spec, n, axis=-1)[:, :L]
        return out.ravel() if flat else out

    def to_dense(self) -> np.ndarray:
        K, L = self.num_blocks, self.block_order
        dense = np.empty((K * L, K * L))
        for k in range(K):
            for l in range(K):
                seq = self.sequences[k, l]
                block = sla.toeplitz(seq[L - 1 :], seq[: L][::-1])
                dense[k * L : (k + 1) * L, l * L : (l + 1) * L] = block
        return dense

    def loaded(self, amounts) -> "BlockToeplitz":
        amounts = np.broadcast_to(np.asarray(amounts, dtype=np.float64), (self.num_blocks,))
        seq = self.sequences.copy()
        L = self.block_order
        for k in range(self.num_blocks):
            seq[k, k, L - 1] += amounts[k]
        return BlockToeplitz(seq)


def toeplitz_matvec(op: SymmetricToeplitz, v: np.ndarray) -> np.ndarray:
    """Multiply a symmetric Toeplitz operator by a vector via FFT embedding."""
    return op.matvec(v)


def block_toeplitz_matvec(op: BlockToeplitz, v: np.ndarray) -> np.ndarray:
    """Multiply a block-Toeplitz operator by a stacked vector via FFT embedding."""
    return op.matvec(v)


def optimal_circulant(seq: np.ndarray, L: int) -> np.ndarray:
    """First column of the circulant closest in Frobenius norm to the Toeplitz
    matrix generated by the two-sided lag sequence seq.

    Equivalent to averaging the dense matrix along wrapped diagonals:
    c[0] = seq at lag 0 and, for l >= 1,
    c[l] = ((L - l) * seq[lag l] + l * seq[lag l - L]) / L.
    """
    c = np.empty(L)
    c[0] = seq[L - 1]
    if L > 1:
        l = np.arange(1, L)
        c[1:] = ((L - l) * seq[L - 1 + l] + l * seq[l - 1]) / L
    return c


def _check_positive(values: np.ndarray, what: str) -> None:
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    tol = scale * np.finfo(np.float64).eps * max(values.size, 1)
    if scale == 0.0 or float(np.min(values)) <= tol:
        raise NonPositivePreconditionerError(
            f"{what} has eigenvalue {float(np.min(values)):.3e} <= tolerance {tol:.3e}"
        )


@dataclass(frozen=True)
class CirculantPreconditioner:
    """Circulant approximation of a symmetric Toeplitz operator.

    eigenvalues is the length-L real DFT spectrum of the circulant's first
    column; apply() divides by it bin-wise.
    """

    eigenvalues: np.ndarray

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=np.float64)
        _check_positive(eig, "circulant preconditioner")
        eig = eig.copy()
        eig.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def order(self) -> int:
        return self.eigenvalues.size

    def apply(self, v: np.ndarray) -> np.ndarray:
        L = self.order
        spec = sfft.rfft(np.asarray(v, dtype=np.float64), L, axis=-1)
        return sfft.irfft(spec / self.eigenvalues[: L // 2 + 1], L, axis=-1)

    __call__ = apply


def build_circulant_preconditioner(op: SymmetricToeplitz) -> CirculantPreconditioner:
    """Construct the Frobenius-closest circulant to op and factor it."""
    col = op.first_column
    seq = np.concatenate([col[1:][::-1], col])
    c = optimal_circulant(seq, op.order)
    eig = sfft.fft(c).real
    return CirculantPreconditioner(eig)


@dataclass(frozen=True)
class BlockCirculantPreconditioner:
    """Block preconditioner that is circulant within each Toeplitz block.

    A frequency-domain change of basis decouples it into L independent
    K x K Hermitian matrices (one per FFT bin), stored alongside their
    inverses. Positive definiteness of every bin is verified at
    construction via a batched Cholesky factorization.
    """

    bins: np.ndarray
    bin_inverses: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.complex128)
        if bins.ndim != 3 or bins.shape[1] != bins.shape[2]:
            raise ValueError(f"bins must have shape (L, K, K), got {bins.shape}")
        bins = 0.5 * (bins + np.conj(bins.transpose(0, 2, 1)))
        try:
            np.linalg.cholesky(bins)
        except np.linalg.LinAlgError as exc:
            raise NonPositivePreconditionerError(
                f"a frequency bin of the block preconditioner is not positive definite: {exc}"
            ) from None
        inv = np.linalg.inv(bins)
        bins.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "bins", bins)
        object.__setattr__(self, "bin_inverses", inv)

    @property
    def block_order(self) -> int:
        return self.bins.shape[0]

    @property
    def num_blocks(self) -> int:
        return self.bins.shape[1]

    def apply(self, v: np.ndarray) -> np.ndarray:
        K, L = self.num_blocks, self.block_order
        flat = v.ndim == 1
        V = np.asarray(v, dtype=np.float64).reshape(K, L)
        if K == 1:
            # single block: same 1-D arithmetic as the scalar preconditioner,
            # so a one-reference solve is bitwise identical on either path
            spec = sfft.rfft(V[0], L)
            out = sfft.irfft(spec / self.bins[: L // 2 + 1, 0, 0].real, L)
            return out if flat else out[None, :]
        spec = sfft.fft(V, axis=-1)
        out_spec = np.einsum("fkl,lf->kf", self.bin_inverses, spec)
        out = sfft.ifft(out_spec, axis=-1).real
        return out.ravel() if flat else out

    __call__ = apply


def build_block_circulant_preconditioner(op: BlockToeplitz) -> BlockCirculantPreconditioner:
    """Construct the per-block Frobenius-closest circulant preconditioner."""
    K, L = op.num_blocks, op.block_order
    bins = np.empty((L, K, K), dtype=np.complex128)
    for k in range(K):
        for l in range(K):
            bins[:, k, l] = sfft.fft(optimal_circulant(op.sequences[k, l], L))
    return BlockCirculantPreconditioner(bins)


@dataclass(frozen=True)
class CgdOptions:
    """Conjugate-gradient controls.

    rel_tol == 0 runs exactly max_iters iterations (fixed-iteration mode);
    a positive value stops once the relative residual falls below it.
    record_residuals keeps the full per-iteration residual history instead
    of only the final value.
    """

    max_iters: int = 10
    rel_tol: float = 0.0
    record_residuals: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.rel_tol < 0:
            raise ValueError(f"rel_tol must be >= 0, got {self.rel_tol}")


def _as_matvec(op):
    if callable(op):
        return op
    return op.matvec


def _cgd_single(matvec, precond, b, x0, options):
    b = np.asarray(b, dtype=np.float64)
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b), np.zeros(1)

    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = np.asarray(x0, dtype=np.float64).copy()
        r = b - matvec(x)

    history = [float(np.linalg.norm(r)) / b_norm]
    z = precond(r) if precond is not None else r
    rz = float(np.dot(r, z))
    p = z.copy()

    for _ in range(options.max_iters):
        if rz == 0.0 or history[-1] == 0.0:
            break
        Ap = matvec(p)
        pAp = float(np.dot(p, Ap))
        if pAp <= 0.0:
            raise BreakdownError(f"search direction has curvature {pAp:.3e} <= 0")
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        history.append(float(np.linalg.norm(r)) / b_norm)
        if options.rel_tol > 0.0 and history[-1] <= options.rel_tol:
            break
        z = precond(r) if precond is not None else r
        rz_new = float(np.dot(r, z))
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p

    hist = np.asarray(history) if options.record_residuals else np.asarray(history[-1:])
    return x, hist


def cgd_solve(matvec, rhs, *, preconditioner=None, init=None, options: CgdOptions | None = None):
    """Preconditioned conjugate-gradient solve.

    matvec may be a callable or an operator exposing .matvec; likewise the
    preconditioner may be a callable or expose .apply. rhs of shape (n,)
    returns (solution, residual_history); shape (n, nrhs) solves each column
    with the matching column of init and returns (solutions, list of
    histories). Histories hold relative residuals starting from the initial
    guess, so warm starts are visible at index 0.
    """
    options = options or CgdOptions()
    mv = _as_matvec(matvec)
    pc = None
    if preconditioner is not None:
        pc = preconditioner if callable(preconditioner) else preconditioner.apply

    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.ndim == 1:
        return _cgd_single(mv, pc, rhs, init, options)
    if rhs.ndim != 2:
        raise ValueError(f"rhs must be 1-D or 2-D, got ndim={rhs.ndim}")
    out = np.empty_like(rhs)
    histories = []
    for j in range(rhs.shape[1]):
        x0 = None if init is None else np.asarray(init, dtype=np.float64)[:, j]
        out[:, j], hist = _cgd_single(mv, pc, rhs[:, j], x0, options)
        histories.append(hist)
    return out, histories


def direct_solve_toeplitz(op, rhs: np.ndarray) -> np.ndarray:
    """Dense Cholesky solve of a (block-)Toeplitz system.

    Retries with escalating relative diagonal bumps if factorization fails,
    then raises SingularSystemError. Used as reference path and as the
    terminal fallback for the iterative solvers.
    """
    dense = op.to_dense()
    rhs = np.asarray(rhs, dtype=np.float64)
    scale = float(np.max(np.abs(np.diag(dense)))) or 1.0
    eye = np.eye(dense.shape[0])
    for bump in _DENSE_BUMPS:
        try:
            factor = sla.cho_factor(dense + (bump * scale) * eye, lower=True)
        except np.linalg.LinAlgError:
            continue
        return sla.cho_solve(factor, rhs)
    raise SingularSystemError(
        f"dense factorization failed for order {dense.shape[0]} even with bump {_DENSE_BUMPS[-1]:.0e}"
    )


def levinson_solve(op: SymmetricToeplitz, rhs: np.ndarray) -> np.ndarray:
    """Solve a symmetric positive definite Toeplitz system by Levinson
    recursion in O(L^2).

    Only defined for scalar Toeplitz operators; block systems must use cgd
    or the dense path. Raises LevinsonBreakdownError when a leading minor
    is not positive definite.
    """
    if not isinstance(op, SymmetricToeplitz):
        raise TypeError("levinson_solve requires a SymmetricToeplitz operator")
    col = op.first_column
    n = col.size
    r0 = float(col[0])
    if r0 <= 0.0:
        raise LevinsonBreakdownError(f"zero-lag term {r0:.3e} is not positive")

    rhs = np.asarray(rhs, dtype=np.float64)
    if rhs.shape[0] != n:
        raise ValueError(f"rhs length {rhs.shape[0]} does not match operator order {n}")
    flat = rhs.ndim == 1
    b = (rhs.reshape(n, -1) if flat else rhs).astype(np.float64) / r0
    rho = col[1:] / r0

    y = np.zeros_like(b)
    y[0] = b[0]
    if n == 1:
        return y[:, 0] if flat else y

    z = np.zeros(n)
    z[0] = -rho[0]
    beta = 1.0
    alpha = -float(rho[0])
    for k in range(1, n):
        beta = (1.0 - alpha * alpha) * beta
        if beta <= 0.0:
            raise LevinsonBreakdownError(f"reflection denominator {beta:.3e} <= 0 at order {k}")
        mu = (b[k] - rho[:k][::-1] @ y[:k]) / beta
        y[:k] += np.outer(z[:k][::-1], mu)
        y[k] = mu
        if k < n - 1:
            alpha = -(float(rho[k]) + float(rho[:k][::-1] @ z[:k])) / beta
            z[:k] += alpha * z[:k][::-1]
            z[k] = alpha

    return y[:, 0] if flat else y
