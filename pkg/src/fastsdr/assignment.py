"""Optimal reference-to-estimate assignment with deterministic tie-breaking.

The optimizer maximizes the summed profit over injective maps from the
smaller dimension into the larger. Among equally optimal assignments it
returns the lexicographically smallest mapping (reading assigned estimate
indices in reference order, with "unassigned" sorting last), so results are
stable across runs and platforms. Candidate totals are always compared as
exactly rounded sums of the selected matrix entries, keeping ties exact
rather than float-order dependent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class ProfitMatrix:
    """Finite (num_references x num_estimates) profit matrix."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] < 1 or vals.shape[1] < 1:
            raise ValueError(f"profit matrix must be 2-D and nonempty, got shape {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("profit matrix contains non-finite entries")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def shape(self) -> tuple:
        return self.values.shape


def _optimal_values(values: np.ndarray) -> list:
    """Entries of one maximal assignment of a rectangular matrix."""
    if values.shape[0] == 0 or values.shape[1] == 0:
        return []
    rows, cols = linear_sum_assignment(values, maximize=True)
    return [float(v) for v in values[rows, cols]]


def solve_assignment(profits: ProfitMatrix | np.ndarray) -> tuple[dict, float]:
    """Maximize total profit over injective reference->estimate maps.

    Returns (mapping, total) where mapping assigns min(K, M) references to
    distinct estimates. The mapping is the lexicographically smallest among
    all optimal ones: references in increasing order prefer the smallest
    estimate index, and being assigned beats being skipped.
    """
    if not isinstance(profits, ProfitMatrix):
        profits = ProfitMatrix(profits)
    values = profits.values
    K, M = values.shape
    n_assign = min(K, M)
    best = math.fsum(_optimal_values(values))

    mapping: dict[int, int] = {}
    used: list[bool] = [False] * M
    prefix: list[float] = []

    for k in range(K):
        remaining_rows = K - k - 1
        need = n_assign - len(mapping)
        free_cols = [m for m in range(M) if not used[m]]
        candidates: list = list(free_cols)
        if remaining_rows >= need:
            candidates.append(None)

        for cand in candidates:
            if cand is None:
                sub = values[k + 1 :][:, free_cols]
                total = math.fsum(prefix + _optimal_values(sub))
            else:
                rest = [m for m in free_cols if m != cand]
                sub = values[k + 1 :][:, rest]
                total = math.fsum(prefix + [float(values[k, cand])] + _optimal_values(sub))
            if total == best:
                if cand is not None:
                    mapping[k] = cand
                    used[cand] = True
                    prefix.append(float(values[k, cand]))
                break
        else:
            raise RuntimeError("no candidate reached the optimal total; ties are inconsistent")

    return mapping, best
