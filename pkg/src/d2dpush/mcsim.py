"""Monte-Carlo check of the stochastic-geometry model.

Each trial drops every group as an independent Poisson point process on a
square window, decides per user whether it is interested and whether it was
pushed, and then lets every requesting user (UE-T) look for a willing holder
(UE-A) within the D2D radius.  Willingness is an independent coin per
(holder, requester) pair, tossed with the holder's intra- or inter-group
sharing probability.  That independent thinning is what makes the willing
holders around a requester a Poisson process of density ``L_m + O_m``.

Requesters are only scored inside a window shrunk by ``guard_margin`` on each
side, holders come from the whole window, so no requester misses holders that
would exist on an unbounded plane.

Trials use their own Philox substreams spawned from one ``SeedSequence``, so
results do not depend on evaluation order.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from scipy.spatial import cKDTree

from .model import SystemConfig, as_strategy

__all__ = ["SimSpec", "SimResult", "sample_ppp", "run_dissemination", "TALLY_FIELDS"]

TALLY_FIELDS = ("ue_a", "ue_r", "ue_t", "ue_n", "ue_t_inset", "successes")


@dataclass(frozen=True)
class SimSpec:
    trials: int = 1000
    seed: int = 0
    region_side: float = 200.0
    guard_margin: float | None = None  # defaults to the D2D radius

    def margin(self, config: SystemConfig) -> float:
        return config.d2d_radius if self.guard_margin is None else self.guard_margin

    def check(self, config: SystemConfig) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        g = self.margin(config)
        if g < config.d2d_radius:
            raise ValueError(f"guard_margin {g} is smaller than the D2D radius {config.d2d_radius}")
        if not self.region_side > 2 * g:
            raise ValueError(f"region_side {self.region_side} must exceed twice the guard margin {g}")


@dataclass(frozen=True)
class SimResult:
    est_success: np.ndarray   # NaN where a group never produced a scored requester
    success_se: np.ndarray
    est_gain_density: float
    gain_se: float
    counts: np.ndarray        # (trials, M, len(TALLY_FIELDS))
    inset_area: float

    def tally(self, name: str) -> np.ndarray:
        return self.counts[:, :, TALLY_FIELDS.index(name)]


def sample_ppp(density: float, side: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous Poisson points on ``[0, side]^2`` as an ``(n, 2)`` array."""
    if density < 0:
        raise ValueError("density must be non-negative")
    if not side > 0:
        raise ValueError("region side must be positive")
    n = rng.poisson(density * side * side) if density > 0 else 0
    return rng.uniform(0.0, side, size=(n, 2))


def _one_trial(config: SystemConfig, c: np.ndarray, side: float, margin: float,
               rng: np.random.Generator) -> np.ndarray:
    M = config.n_groups
    tallies = np.zeros((M, len(TALLY_FIELDS)), dtype=np.int64)
    holder_pts, holder_grp, req_pts, req_grp = [], [], [], []
    for m, g in enumerate(config.groups):
        pts = sample_ppp(g.density, side, rng)
        n = len(pts)
        interested = rng.random(n) < g.request_prob
        pushed = rng.random(n) < c[m]
        a = interested & pushed
        tt = interested & ~pushed
        inside = np.all((pts >= margin) & (pts <= side - margin), axis=1)
        scored = tt & inside
        tallies[m, :5] = (a.sum(), (pushed & ~interested).sum(), tt.sum(),
                          (~pushed & ~interested).sum(), scored.sum())
        holder_pts.append(pts[a])
        holder_grp.append(np.full(int(a.sum()), m))
        req_pts.append(pts[scored])
        req_grp.append(np.full(int(scored.sum()), m))

    H = np.concatenate(holder_pts)
    hg = np.concatenate(holder_grp)
    R = np.concatenate(req_pts)
    rg = np.concatenate(req_grp)
    if len(H) == 0 or len(R) == 0:
        return tallies

    pairs = cKDTree(R).sparse_distance_matrix(cKDTree(H), config.d2d_radius,
                                              output_type="ndarray")
    if len(pairs) == 0:
        return tallies
    # fixed pair order so the coin sequence only depends on the geometry
    order = np.lexsort((pairs["j"], pairs["i"]))
    ri = pairs["i"][order]
    hj = pairs["j"][order]
    same = rg[ri] == hg[hj]
    p_share = np.where(same, config.rho_in[hg[hj]], config.rho_out[hg[hj]])
    willing = rng.random(len(ri)) < p_share
    served = np.zeros(len(R), dtype=bool)
    served[ri[willing]] = True
    tallies[:, 5] = np.bincount(rg[served], minlength=M)
    return tallies


def run_dissemination(config: SystemConfig, c, spec: SimSpec = SimSpec(),
                      trials_csv: TextIO | None = None) -> SimResult:
    """Simulate ``spec.trials`` independent snapshots of push-then-share."""
    c = as_strategy(config, c)
    spec.check(config)
    side = spec.region_side
    margin = spec.margin(config)
    children = np.random.SeedSequence(spec.seed).spawn(spec.trials)
    counts = np.stack([
        _one_trial(config, c, side, margin, np.random.Generator(np.random.Philox(ss)))
        for ss in children
    ])

    inset_area = (side - 2 * margin) ** 2
    T = spec.trials
    scored = counts[:, :, TALLY_FIELDS.index("ue_t_inset")].astype(float)
    succ = counts[:, :, TALLY_FIELDS.index("successes")].astype(float)

    tot_n = scored.sum(axis=0)
    tot_s = succ.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        p_hat = np.where(tot_n > 0, tot_s / tot_n, np.nan)
        # ratio estimator with trials as clusters: nearby requesters share
        # holders, so a plain binomial error would be too optimistic
        if T > 1:
            resid = succ - p_hat * scored
            nbar = tot_n / T
            se = np.sqrt(np.sum(resid**2, axis=0) / (T * (T - 1))) / nbar
        else:
            se = np.full(config.n_groups, np.nan)
        se = np.where(tot_n > 0, se, np.nan)

    per_trial_gain = succ.sum(axis=1) / inset_area
    gain = float(per_trial_gain.mean())
    gain_se = float(per_trial_gain.std(ddof=1) / math.sqrt(T)) if T > 1 else math.nan

    if trials_csv is not None:
        w = csv.writer(trials_csv, lineterminator="\n")
        w.writerow(["trial", "group", *TALLY_FIELDS])
        for k in range(T):
            for m in range(config.n_groups):
                w.writerow([k, m + 1, *counts[k, m].tolist()])

    return SimResult(p_hat, se, gain, gain_se, counts, inset_area)
