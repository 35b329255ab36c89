"""Separation metrics from correlation statistics and distortion filters.

The pipeline is: normalize channels, compute correlations once, solve one
symmetric Toeplitz system per reference (all estimates as right-hand
sides), optionally solve one block-Toeplitz system per estimate, reduce to
cosine ratios, then map to decibels. SDR depends only on the Toeplitz
stage; SIR and SAR additionally need the block stage, which warm starts
from the per-reference solutions when solved iteratively.

All dB values derive from ratios in (0, 1) through f(x) = 10 log10(x/(1-x));
ratios are clamped away from {0, 1} and every clamp is recorded in the
diagnostics rather than silently applied.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .assignment import ProfitMatrix, solve_assignment
from .correlation import CorrelationSet, compute_correlations
from .errors import SolverError, SolverFailureError
from .signals import EvalConfig, MultichannelSignal, as_signal, normalize_unit_norm, validate_pairing
from .solvers import (
    BlockToeplitz,
    CgdOptions,
    SymmetricToeplitz,
    build_block_circulant_preconditioner,
    build_circulant_preconditioner,
    cgd_solve,
    default_loading,
    direct_solve_toeplitz,
    levinson_solve,
)


def clamp_unit(x: np.ndarray, eps: float) -> np.ndarray:
    """Clamp ratios into [eps, 1 - eps] so the dB map stays finite."""
    return np.clip(x, eps, 1.0 - eps)


def db_map(x):
    """Map a ratio in (0, 1) to decibels: 10 log10(x / (1 - x))."""
    x = np.asarray(x, dtype=np.float64)
    return 10.0 * np.log10(x / (1.0 - x))


@dataclass(frozen=True)
class DistortionFilters:
    """Solutions of the distortion-filter systems.

    toeplitz has shape (K, M, L): filter from reference k alone to estimate
    m. block has the same shape when computed: the k-th segment of the
    all-references filter for estimate m; None when only SDR was requested.
    loadings holds the per-reference diagonal loading that was added to the
    systems; the cosine reduction needs it to report the energy fractions
    of the regularized problem exactly.
    """

    toeplitz: np.ndarray
    loadings: np.ndarray
    block: np.ndarray | None = None


@dataclass
class Diagnostics:
    """Numerical bookkeeping for one evaluation."""

    solver: str
    toeplitz_systems: int = 0
    block_systems: int = 0
    cgd_iterations: list = field(default_factory=list)
    final_residuals: list = field(default_factory=list)
    fallbacks: list = field(default_factory=list)
    clamp_events: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "solver": self.solver,
            "toeplitz_systems": self.toeplitz_systems,
            "block_systems": self.block_systems,
            "cgd_iterations": list(self.cgd_iterations),
            "final_residuals": list(self.final_residuals),
            "fallbacks": list(self.fallbacks),
            "clamp_events": [dict(e) for e in self.clamp_events],
        }


@dataclass(frozen=True)
class CosineMetrics:
    """Clamped cosine ratios underlying the dB metrics.

    single has shape (K, M): squared cosine between estimate m and the
    shifted span of reference k. joint has shape (M,): squared cosine
    against the span of all references. interference is their ratio,
    computed from the unclamped values and then clamped. joint and
    interference are None when the block stage was skipped.
    """

    single: np.ndarray
    joint: np.ndarray | None
    interference: np.ndarray | None

    def target_angles(self) -> np.ndarray:
        """Angle (radians) between each estimate and each reference span."""
        return np.arccos(np.sqrt(self.single))

    def interference_angles(self) -> np.ndarray:
        """Angle between per-reference and all-reference projections."""
        if self.interference is None:
            raise ValueError("interference angles need the block stage (sir/sar)")
        return np.arccos(np.sqrt(self.interference))

    def artifact_angles(self) -> np.ndarray:
        """Angle between each estimate and the span of all references."""
        if self.joint is None:
            raise ValueError("artifact angles need the block stage (sir/sar)")
        return np.arccos(np.sqrt(self.joint))


@dataclass(frozen=True)
class BssEvalResult:
    """Metrics, optional channel assignment, and diagnostics for one run."""

    sdr: np.ndarray | None
    sir: np.ndarray | None
    sar: np.ndarray | None
    permutation: tuple | None
    cosines: CosineMetrics
    diagnostics: Diagnostics
    config: EvalConfig

    def aligned(self) -> dict | None:
        """Per-reference metrics under the resolved assignment."""
        if self.permutation is None:
            return None
        out: dict = {}
        for name, table in (("sdr", self.sdr), ("sir", self.sir)):
            if table is not None:
                out[name] = [
                    None if m is None else float(table[k, m])
                    for k, m in enumerate(self.permutation)
                ]
        if self.sar is not None:
            out["sar"] = [
                None if m is None else float(self.sar[m])
                for m in self.permutation
            ]
        return out

    def to_dict(self) -> dict:
        def listify(a):
            return None if a is None else np.asarray(a, dtype=np.float64).tolist()

        return {
            "sdr": listify(self.sdr),
            "sir": listify(self.sir),
            "sar": listify(self.sar),
            "permutation": None if self.permutation is None else list(self.permutation),
            "aligned": self.aligned(),
        }


def _solver_chain(primary: str, stage: str) -> list:
    # levinson has no block form; that stage routes to the dense solver
    if stage == "block" and primary == "levinson":
        primary = "direct"
    return [primary] + [s for s in ("cgd", "direct") if s != primary]


def _run_one(name, op, rhs, init, precond, options, diag, stage):
    if name == "direct":
        return direct_solve_toeplitz(op, rhs)
    if name == "levinson":
        if stage == "block":
            raise SolverError("levinson cannot solve block systems")
        return levinson_solve(op, rhs)
    solution, hists = cgd_solve(
        op, rhs, preconditioner=precond(), init=init, options=options
    )
    if rhs.ndim == 1:
        hists = [hists]
    for h in hists:
        diag.cgd_iterations.append(max(len(h) - 1, 0))
        diag.final_residuals.append(float(h[-1]))
    return solution


def _solve_with_fallback(op, rhs, init, cfg, diag, stage, precond_builder):
    options = CgdOptions(max_iters=cfg.cgd_iters, rel_tol=cfg.cgd_tol)
    chain = _solver_chain(cfg.solver, stage)
    precond = None

    def build_precond():
        nonlocal precond
        if precond is None:
            precond = precond_builder(op)
        return precond

    last: Exception | None = None
    for i, name in enumerate(chain):
        try:
            return _run_one(name, op, rhs, init, build_precond, options, diag, stage)
        except SolverError as exc:
            last = exc
            rest = chain[i + 1 :]
            if rest:
                diag.fallbacks.append(
                    f"{stage}: {name} failed ({type(exc).__name__}: {exc}); trying {rest[0]}"
                )
    raise SolverFailureError(f"all solvers failed for {stage} stage: {last}") from last


def compute_filters_sdr(corr: CorrelationSet, cfg: EvalConfig, diag: Diagnostics) -> DistortionFilters:
    """Solve the per-reference Toeplitz systems (one per k, all estimates)."""
    K, M, L = corr.num_references, corr.num_estimates, corr.filter_length
    h = np.empty((K, M, L))
    lams = np.empty(K)
    for k in range(K):
        col = corr.toeplitz_column(k).astype(np.float64)
        lams[k] = default_loading(float(col[0]), L, cfg.dtype)
        op = SymmetricToeplitz(col).loaded(lams[k])
        rhs = corr.xcorr[k].T.astype(np.float64)
        sol = _solve_with_fallback(
            op, rhs, None, cfg, diag, "toeplitz", build_circulant_preconditioner
        )
        h[k] = sol.T
        diag.toeplitz_systems += M
    return DistortionFilters(toeplitz=h, loadings=lams)


def compute_filters_sir(
    corr: CorrelationSet,
    warm: DistortionFilters | None,
    cfg: EvalConfig,
    diag: Diagnostics,
) -> DistortionFilters:
    """Solve the all-references block system for every estimate.

    Iterative solves start from the stacked per-reference filters, which
    already capture most of the solution when cross-talk is moderate. When
    warm is None those filters are computed here first; they are needed for
    the cosine reduction regardless.
    """
    if warm is None:
        warm = compute_filters_sdr(corr, cfg, diag)
    K, M, L = corr.num_references, corr.num_estimates, corr.filter_length
    op = BlockToeplitz(corr.acf.astype(np.float64)).loaded(warm.loadings)
    rhs = corr.xcorr.transpose(0, 2, 1).reshape(K * L, M).astype(np.float64)
    init = warm.toeplitz.transpose(0, 2, 1).reshape(K * L, M)
    sol = _solve_with_fallback(
        op, rhs, init, cfg, diag, "block", build_block_circulant_preconditioner
    )
    diag.block_systems += M
    g = sol.reshape(K, L, M).transpose(0, 2, 1)
    return DistortionFilters(toeplitz=warm.toeplitz, loadings=warm.loadings, block=g)


def cosine_metrics(
    corr: CorrelationSet,
    filters: DistortionFilters,
    cfg: EvalConfig,
    diag: Diagnostics | None = None,
) -> CosineMetrics:
    """Reduce filters to clamped cosine ratios, recording any clamps.

    The reported ratios are the energy fractions realized by the loaded
    systems: with projection energy u = x.h - lam |h|^2 and estimate energy
    e, the fraction is u / (e - 2 lam |h|^2), which matches a dense
    projection built from the identically loaded Gram matrix to rounding
    accuracy instead of only to O(lam).
    """
    eps = cfg.clamp
    xc = corr.xcorr.astype(np.float64)
    lam = filters.loadings[:, None]
    e = corr.est_energy[None, :]

    h = filters.toeplitz
    h_sq = np.einsum("kml,kml->km", h, h)
    u = np.einsum("kml,kml->km", xc, h) - lam * h_sq
    c_raw = u / (e - 2.0 * lam * h_sq)

    d_raw = None
    ratio_raw = None
    if filters.block is not None:
        g = filters.block
        g_sq = np.einsum("kml,kml->km", g, g)
        u_joint = np.einsum("kml,kml->m", xc, g) - np.sum(lam * g_sq, axis=0)
        d_raw = u_joint / (corr.est_energy - 2.0 * np.sum(lam * g_sq, axis=0))
        # interference energy of the loaded problem: |Ag - A_k h|^2 expands to
        # u_joint - u - 2 lam (|h|^2 - h.g), all in terms of known quantities
        h_dot_g = np.einsum("kml,kml->km", h, g)
        denom = u_joint[None, :] - 2.0 * lam * (h_sq - h_dot_g)
        ratio_raw = u / np.maximum(denom, eps * e)

    def clamp_and_log(raw, quantity, indices):
        clamped = clamp_unit(raw, eps)
        if diag is not None:
            for idx in zip(*np.nonzero(clamped != raw)):
                event = {"quantity": quantity, "value": float(raw[idx])}
                event.update(indices(idx))
                diag.clamp_events.append(event)
        return clamped

    c = clamp_and_log(c_raw, "single", lambda i: {"reference": int(i[0]), "estimate": int(i[1])})
    d = None
    ratio = None
    if d_raw is not None:
        d = clamp_and_log(d_raw, "joint", lambda i: {"estimate": int(i[0])})
        ratio = clamp_and_log(
            ratio_raw, "interference", lambda i: {"reference": int(i[0]), "estimate": int(i[1])}
        )
    return CosineMetrics(single=c, joint=d, interference=ratio)


def bss_eval(
    references,
    estimates,
    config: EvalConfig | None = None,
    *,
    workers: int = 1,
) -> BssEvalResult:
    """Evaluate SDR/SIR/SAR between reference and estimated sources.

    references and estimates are (channels, samples) arrays or
    MultichannelSignal instances with equal sample counts. Results are
    invariant to per-channel rescaling of either input.
    """
    cfg = config or EvalConfig()
    refs = as_signal(references)
    ests = as_signal(estimates)
    validate_pairing(refs, ests, cfg.filter_length)
    refs = normalize_unit_norm(refs.astype(cfg.dtype), role="reference")
    ests = normalize_unit_norm(ests.astype(cfg.dtype), role="estimate")

    corr = compute_correlations(
        refs, ests, cfg.filter_length, dtype=cfg.dtype, workers=workers
    )
    diag = Diagnostics(solver=cfg.solver)

    filters = compute_filters_sdr(corr, cfg, diag)
    if cfg.metrics & {"sir", "sar"}:
        filters = compute_filters_sir(corr, filters, cfg, diag)
    cos = cosine_metrics(corr, filters, cfg, diag)

    sdr = db_map(cos.single) if "sdr" in cfg.metrics else None
    sir = db_map(cos.interference) if "sir" in cfg.metrics else None
    sar = db_map(cos.joint) if "sar" in cfg.metrics else None

    permutation = None
    if cfg.resolve_permutation:
        profits = sir if sir is not None else (sdr if sdr is not None else db_map(cos.single))
        mapping, _ = solve_assignment(ProfitMatrix(profits))
        permutation = tuple(mapping.get(k) for k in range(refs.channels))

    return BssEvalResult(
        sdr=sdr,
        sir=sir,
        sar=sar,
        permutation=permutation,
        cosines=cos,
        diagnostics=diag,
        config=cfg,
    )


def si_sdr(references, estimates, config: EvalConfig | None = None, *, workers: int = 1) -> BssEvalResult:
    """Scale-invariant SDR: SDR evaluated with a single-tap distortion filter.

    The returned result carries the L = 1 SDR matrix; pair (k, m) equals
    10 log10(|<s_k, e_m>|^2 / (|s_k|^2 |e_m|^2 - |<s_k, e_m>|^2)) for
    unit-normalized signals.
    """
    cfg = config or EvalConfig()
    cfg = replace(cfg, filter_length=1, metrics=frozenset({"sdr"}))
    return bss_eval(references, estimates, cfg, workers=workers)
