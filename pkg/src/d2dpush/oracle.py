"""Exhaustive lattice search over the pushing-strategy hypercube.

This is the ground truth the solvers are checked against, so it stays as
dumb as possible: evaluate the exact gain on every lattice point and keep
the best one, breaking ties towards the lexicographically smallest strategy.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .model import SystemConfig, gain_batch

__all__ = ["GridSpec", "GridBudgetError", "OracleResult", "grid_search",
           "grid_slack", "write_lattice_csv"]

# lattice points evaluated per vectorised chunk
_CHUNK_POINTS = 1 << 21


class GridBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    step: float = 0.01
    budget: int = 10**9

    def __post_init__(self):
        if not (0 < self.step <= 1):
            raise ValueError(f"grid step must lie in (0, 1], got {self.step!r}")
        if self.budget < 1:
            raise ValueError("grid budget must be positive")

    @property
    def points_per_axis(self) -> int:
        # the small nudge keeps steps like 0.1 or 0.001 from losing their last point
        return int(math.floor(1.0 / self.step + 1e-9)) + 1

    def axis(self) -> np.ndarray:
        return np.minimum(np.arange(self.points_per_axis) * self.step, 1.0)


@dataclass(frozen=True)
class OracleResult:
    strategy: np.ndarray
    gain: float
    eps_grid: float
    evaluations: int


def grid_slack(config: SystemConfig, step: float) -> float:
    """Crude bound on how much the best lattice point can trail the true optimum.

    Each partial derivative of the gain is bounded by ``t_m + B * T * rho_max
    * T`` with ``T = sum t``; the slack is that gradient-norm bound times
    ``step * sqrt(M)``.
    """
    t = config.t
    T = float(t.sum())
    rho_max = float(max(config.rho_in.max(), config.rho_out.max()))
    partial = t + config.area * T * rho_max * T
    L = float(np.linalg.norm(partial))
    return L * step * math.sqrt(config.n_groups)


def _check_budget(n_axis: int, dims: int, budget: int) -> int:
    total = n_axis**dims
    if total > budget:
        raise GridBudgetError(
            f"lattice has {n_axis}^{dims} = {total:.3g} points, over the budget of "
            f"{budget:.3g}; use a coarser step or fewer groups"
        )
    return total


def _free_axes(config: SystemConfig) -> np.ndarray:
    # inert groups do not move the gain; pinning them at 0 is exactly what the
    # lexicographic tie rule would pick
    return np.flatnonzero(~config.inert)


def grid_search(config: SystemConfig, spec: GridSpec = GridSpec()) -> OracleResult:
    """Best lattice strategy, its gain and the slack :func:`grid_slack`."""
    M = config.n_groups
    free = _free_axes(config)
    axis = spec.axis()
    n = len(axis)
    d = len(free)
    total = _check_budget(n, d, spec.budget)
    eps = grid_slack(config, spec.step)
    if d == 0:
        return OracleResult(np.zeros(M), 0.0, eps, 1)

    # row-major traversal in chunks of consecutive flat indices; flat order is
    # lexicographic order, so keeping the first strict maximum is the tie rule
    best_gain = -math.inf
    best_flat = 0
    chunk = max(1, _CHUNK_POINTS)
    shape = (n,) * d
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.stack(np.unravel_index(flat, shape), axis=-1)
        C = np.zeros((len(flat), M))
        C[:, free] = axis[idx]
        G = gain_batch(config, C)
        k = int(np.argmax(G))
        if G[k] > best_gain:
            best_gain = float(G[k])
            best_flat = int(flat[k])

    best = np.zeros(M)
    best[free] = axis[list(np.unravel_index(best_flat, shape))]
    return OracleResult(best, best_gain, eps, total)


def write_lattice_csv(config: SystemConfig, spec: GridSpec, fh: TextIO,
                      max_rows: int = 10**6) -> int:
    """Dump every lattice point and its gain; for debugging small instances."""
    M = config.n_groups
    axis = spec.axis()
    total = _check_budget(len(axis), M, min(spec.budget, max_rows))
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow([f"c_{m + 1}" for m in range(M)] + ["gain"])
    shape = (len(axis),) * M
    for start in range(0, total, _CHUNK_POINTS):
        flat = np.arange(start, min(start + _CHUNK_POINTS, total))
        C = axis[np.stack(np.unravel_index(flat, shape), axis=-1)]
        G = gain_batch(config, C)
        for row, g in zip(C, G):
            writer.writerow([repr(float(x)) for x in row] + [repr(float(g))])
    return total
