"""Benchmark harness over seeded synthetic evaluation workloads.

Each grid cell fixes (channels, duration, filter length, solver), builds a
batch of synthetic reference/estimate pairs outside the timer, runs one
warmup evaluation, then times `repeats` passes over the batch with a
monotonic clock. Reported numbers are per-batch wall times.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy.signal import lfilter

from .metrics import bss_eval
from .oracle import MixtureSpec, generate_mixture
from .signals import EvalConfig, MultichannelSignal


@dataclass(frozen=True)
class BenchCell:
    """Timing summary for one benchmark configuration."""

    channels: int
    duration: float
    filter_length: int
    solver: str
    batch: int
    repeats: int
    mean_ms: float
    std_ms: float
    times_ms: tuple

    def as_dict(self) -> dict:
        return asdict(self)


def _ar1_references(rng: np.random.Generator, channels: int, num_samples: int) -> np.ndarray:
    white = rng.standard_normal((channels, num_samples))
    return lfilter([1.0], [1.0, -0.9], white, axis=-1)


def make_workload(
    channels: int,
    num_samples: int,
    batch: int,
    seed: int,
    sample_rate: float = 16000.0,
) -> list:
    """Deterministic batch of (references, estimates) evaluation pairs."""
    pairs = []
    for i in range(batch):
        rng = np.random.default_rng((seed, channels, num_samples, i))
        refs = MultichannelSignal(_ar1_references(rng, channels, num_samples), sample_rate)
        mix = MixtureSpec(num_estimates=channels, filter_taps=16, noise_scale=0.05)
        ests = generate_mixture(refs, mix, seed=int(rng.integers(2**32)))
        pairs.append((refs, ests))
    return pairs


def run_benchmark(
    channels=(2,),
    durations=(5.0,),
    filter_lengths=(512,),
    solvers=("cgd",),
    *,
    sample_rate: float = 16000.0,
    batch: int = 10,
    repeats: int = 10,
    seed: int = 0,
    metrics=("sdr", "sir", "sar"),
    cgd_iters: int = 10,
    precision: str = "double",
    workers: int = 1,
) -> list:
    """Time every cell of the benchmark grid; returns a list of BenchCell."""
    cells = []
    for K in channels:
        for dur in durations:
            T = int(round(dur * sample_rate))
            pairs = make_workload(K, T, batch, seed, sample_rate)
            for L in filter_lengths:
                for solver in solvers:
                    cfg = EvalConfig(
                        filter_length=L,
                        solver=solver,
                        cgd_iters=cgd_iters,
                        precision=precision,
                        metrics=frozenset(metrics),
                        resolve_permutation=False,
                    )
                    bss_eval(pairs[0][0], pairs[0][1], cfg, workers=workers)  # warmup
                    times = []
                    for _ in range(repeats):
                        t0 = time.perf_counter()
                        for refs, ests in pairs:
                            bss_eval(refs, ests, cfg, workers=workers)
                        times.append((time.perf_counter() - t0) * 1e3)
                    arr = np.asarray(times)
                    cells.append(
                        BenchCell(
                            channels=K,
                            duration=dur,
                            filter_length=L,
                            solver=solver,
                            batch=batch,
                            repeats=repeats,
                            mean_ms=float(arr.mean()),
                            std_ms=float(arr.std(ddof=1)) if repeats > 1 else 0.0,
                            times_ms=tuple(float(t) for t in times),
                        )
                    )
    return cells


def format_table(cells) -> str:
    """Plain-text table: one row per (channels, solver), columns by
    (filter_length, duration), cells showing mean +/- std per batch."""
    col_keys = sorted({(c.filter_length, c.duration) for c in cells})
    row_keys = sorted({(c.channels, c.solver) for c in cells}, key=lambda r: (r[0], r[1]))
    lookup = {(c.channels, c.solver, c.filter_length, c.duration): c for c in cells}

    headers = ["channels/solver"] + [f"L={L} T={dur:g}s" for L, dur in col_keys]
    rows = []
    for K, solver in row_keys:
        row = [f"K={K} {solver}"]
        for L, dur in col_keys:
            cell = lookup.get((K, solver, L, dur))
            row.append(f"{cell.mean_ms:.1f}±{cell.std_ms:.1f}ms" if cell else "-")
        rows.append(row)

    widths = [max(len(r[i]) for r in [headers] + rows) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    batches = {(c.batch, c.repeats) for c in cells}
    if len(batches) == 1:
        b, r = batches.pop()
        lines.append(f"(per-batch wall time, batch={b}, repeats={r})")
    return "\n".join(lines)
