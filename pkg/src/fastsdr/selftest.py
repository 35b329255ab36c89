"""Built-in numerical self-checks runnable from the CLI.

Each check exercises one identity the implementation relies on (FFT
correlations vs direct sums, fast metrics vs dense projections, solver
agreement, preconditioner round-trips) on small seeded problems and
reports its worst deviation against a fixed tolerance.
"""

from __future__ import annotations

import numpy as np
import scipy.fft as sfft

from .correlation import compute_correlations
from .metrics import bss_eval
from .oracle import decompose, metrics_via_decomposition
from .signals import EvalConfig, MultichannelSignal, normalize_unit_norm
from .solvers import (
    BlockToeplitz,
    SymmetricToeplitz,
    build_block_circulant_preconditioner,
    build_circulant_preconditioner,
    cgd_solve,
    CgdOptions,
    default_loading,
    direct_solve_toeplitz,
    levinson_solve,
)


def _naive_correlations(refs, ests, L):
    K, T = refs.shape
    M = ests.shape[0]
    acf = np.zeros((K, K, 2 * L - 1))
    xc = np.zeros((K, M, L))
    for k in range(K):
        for l in range(K):
            for t in range(-(L - 1), L):
                a, b = (refs[k], refs[l]) if t >= 0 else (refs[l], refs[k])
                tt = abs(t)
                acf[k, l, L - 1 + t] = float(a[: T - tt] @ b[tt:])
        for m in range(M):
            for t in range(L):
                xc[k, m, t] = float(refs[k][: T - t] @ ests[m][t:])
    return acf, xc


def _loaded_toeplitz(rng, L):
    sig = rng.standard_normal(4 * L)
    col = np.correlate(sig, sig, mode="full")[sig.size - 1 : sig.size - 1 + L]
    return SymmetricToeplitz(col).loaded(default_loading(float(col[0]), L))


def _check_correlations() -> dict:
    rng = np.random.default_rng(11)
    refs = rng.standard_normal((2, 64))
    ests = rng.standard_normal((2, 64))
    corr = compute_correlations(refs, ests, 8)
    acf, xc = _naive_correlations(refs, ests, 8)
    dev = max(float(np.abs(corr.acf - acf).max()), float(np.abs(corr.xcorr - xc).max()))
    return {"name": "fft-correlations-vs-direct-sums", "max_deviation": dev, "tolerance": 1e-10}


def _check_equivalence() -> dict:
    worst = 0.0
    for seed in range(5):
        rng = np.random.default_rng(100 + seed)
        K, T, L = 2, 96, 8
        refs = normalize_unit_norm(rng.standard_normal((K, T)))
        ests = normalize_unit_norm(
            np.stack([
                0.8 * refs.samples[m] + 0.3 * refs.samples[(m + 1) % K]
                + 0.1 * rng.standard_normal(T)
                for m in range(K)
            ])
        )
        cfg = EvalConfig(filter_length=L, solver="direct", resolve_permutation=False)
        res = bss_eval(refs, ests, cfg)
        for m in range(K):
            decs = decompose(refs, ests.samples[m], L)
            for k in range(K):
                sdr, sir, sar = metrics_via_decomposition(decs[k])
                worst = max(
                    worst,
                    abs(res.sdr[k, m] - sdr),
                    abs(res.sir[k, m] - sir),
                    abs(res.sar[m] - sar),
                )
    return {"name": "fast-metrics-vs-dense-projections", "max_deviation": worst, "tolerance": 1e-8}


def _check_scalar_preconditioner() -> dict:
    rng = np.random.default_rng(21)
    L = 128
    op = _loaded_toeplitz(rng, L)
    pre = build_circulant_preconditioner(op)
    v = rng.standard_normal(L)
    forward = sfft.irfft(sfft.rfft(v, L) * pre.eigenvalues[: L // 2 + 1], L)
    dev = float(np.abs(pre.apply(forward) - v).max())
    return {"name": "circulant-preconditioner-roundtrip", "max_deviation": dev, "tolerance": 1e-10}


def _check_block_preconditioner() -> dict:
    rng = np.random.default_rng(22)
    K, T, L = 2, 512, 64
    refs = rng.standard_normal((K, T))
    corr = compute_correlations(refs, refs[:1], L)
    lams = [default_loading(float(corr.acf[k, k, L - 1]), L) for k in range(K)]
    op = BlockToeplitz(corr.acf).loaded(lams)
    pre = build_block_circulant_preconditioner(op)
    v = rng.standard_normal(K * L)
    spec = sfft.fft(v.reshape(K, L), axis=-1)
    forward = sfft.ifft(np.einsum("fkl,lf->kf", pre.bins, spec), axis=-1).real.ravel()
    dev = float(np.abs(pre.apply(forward) - v).max())
    return {"name": "block-preconditioner-roundtrip", "max_deviation": dev, "tolerance": 1e-10}


def _check_levinson() -> dict:
    rng = np.random.default_rng(23)
    op = _loaded_toeplitz(rng, 64)
    b = rng.standard_normal(64)
    dev = float(np.abs(levinson_solve(op, b) - direct_solve_toeplitz(op, b)).max())
    return {"name": "levinson-vs-dense-solve", "max_deviation": dev, "tolerance": 1e-8}


def _check_cgd() -> dict:
    rng = np.random.default_rng(24)
    op = _loaded_toeplitz(rng, 256)
    b = rng.standard_normal(256)
    pre = build_circulant_preconditioner(op)
    _, hist = cgd_solve(op, b, preconditioner=pre, options=CgdOptions(max_iters=10))
    return {"name": "preconditioned-cgd-10-iterations", "max_deviation": float(hist[-1]), "tolerance": 1e-4}


_CHECKS = (
    _check_correlations,
    _check_equivalence,
    _check_scalar_preconditioner,
    _check_block_preconditioner,
    _check_levinson,
    _check_cgd,
)


def run_selftest(zero_tolerance: bool = False) -> tuple:
    """Run every check; returns (all_passed, list of check dicts).

    zero_tolerance forces every tolerance to zero, guaranteeing failures;
    it exists to exercise failure reporting and exit codes.
    """
    checks = []
    for fn in _CHECKS:
        check = fn()
        if zero_tolerance:
            check["tolerance"] = 0.0
        check["passed"] = bool(check["max_deviation"] <= check["tolerance"])
        checks.append(check)
    return all(c["passed"] for c in checks), checks


def format_report(checks) -> str:
    lines = []
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        lines.append(
            f"{c['name']}: max deviation {c['max_deviation']:.3e} "
            f"(tolerance {c['tolerance']:.1e}) {status}"
        )
    return "\n".join(lines)
