"""Closed-form optimal pushing when intra- and inter-group sharing coincide.

With ``share_intra == share_inter == rho`` the gain collapses to

    G(c) = (sum_m t_m (1 - c_m)) * (1 - exp(-B sum_k t_k rho_k c_k))

Sorting the groups by ``rho`` the optimum has the shape ``[0, ..., 0, x, 1,
..., 1]``: low-sharing groups are never pushed, high-sharing groups are always
pushed and at most one "watershed" group in between gets a fractional
probability given by a Lambert-W expression.  Groups sharing the same ``rho``
are merged into a single super-group first and share its probability.

Indices inside this module are 0-based positions in the sorted (and merged)
instance unless stated otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lambertw import lambert_w0_of_exp
from .model import SystemConfig, rho_close, shared_gain

__all__ = [
    "AnalyticSolution",
    "AnalyticError",
    "POSITIVE_TOL",
    "watershed_conditions",
    "f1",
    "f0",
    "watershed_push_prob",
    "kkt_residual",
    "solve_sorted",
    "solve_nonuniform",
    "solve_group_independent",
    "solve_with_sharing",
]

# f > POSITIVE_TOL counts as strictly positive; knife-edge cases fall to the
# boundary branch, where both branches give the same gain anyway.
POSITIVE_TOL = 1e-12

FRACTIONAL = "fractional-watershed"
BOUNDARY = "boundary"


class AnalyticError(RuntimeError):
    pass


def _sorted_arrays(t, rho):
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if t.shape != rho.shape or t.ndim != 1:
        raise ValueError("t and rho must be 1-D arrays of equal length")
    return t, rho


def _tail_exponents(t, rho, area):
    # E[k] = B * sum_{j >= k} t_j rho_j, with E[M] = 0
    tr = area * t * rho
    E = np.zeros(len(t) + 1)
    E[:-1] = np.cumsum(tr[::-1])[::-1]
    return E


def watershed_conditions(t, rho, area: float) -> tuple[np.ndarray, np.ndarray]:
    """Both watershed test functions for every sorted position.

    Returns ``(f1, f0)`` where, with ``S_m = sum_{i <= m} t_i`` and ``E_k =
    B sum_{j >= k} t_j rho_j``::

        f1[m] = 1 + B rho_m S_m - exp(E_{m+1})
        f0[m] = exp(E_m) - B rho_m S_{m-1} - 1

    Empty sums are zero.  ``f1[m] > 0`` says pushing nothing in group ``m``
    is not optimal, ``f0[m] > 0`` says pushing everybody in it is not.
    """
    t, rho = _sorted_arrays(t, rho)
    E = _tail_exponents(t, rho, area)
    S = np.cumsum(t)
    S_prev = np.concatenate(([0.0], S[:-1]))
    with np.errstate(over="ignore"):
        f1v = area * rho * S - np.expm1(E[1:])
        f0v = np.expm1(E[:-1]) - area * rho * S_prev
    return f1v, f0v


def _check_position(t, m):
    if not 0 <= m < len(t):
        raise IndexError(f"position {m} out of range for {len(t)} groups")


def f1(t, rho, area: float, m: int) -> float:
    t, rho = _sorted_arrays(t, rho)
    _check_position(t, m)
    return float(watershed_conditions(t, rho, area)[0][m])


def f0(t, rho, area: float, m: int) -> float:
    t, rho = _sorted_arrays(t, rho)
    _check_position(t, m)
    return float(watershed_conditions(t, rho, area)[1][m])


def watershed_push_prob(t, rho, area: float, m: int) -> float:
    """Fractional optimum of the watershed group at sorted position ``m``.

    Solves ``B rho_m (S_m - t_m c) + 1 = exp(E_{m+1} + B t_m rho_m c)`` with
    the principal Lambert-W branch.  Both watershed conditions must hold.
    """
    t, rho = _sorted_arrays(t, rho)
    _check_position(t, m)
    f1v, f0v = watershed_conditions(t, rho, area)
    if not (f1v[m] > POSITIVE_TOL and f0v[m] > POSITIVE_TOL):
        raise AnalyticError(
            f"position {m} is not a watershed (f1={f1v[m]!r}, f0={f0v[m]!r}); "
            "classify the instance before asking for its watershed probability"
        )
    if t[m] <= 0 or rho[m] <= 0:
        raise AnalyticError(f"watershed needs t > 0 and rho > 0 at position {m}")
    E = _tail_exponents(t, rho, area)
    s = area * rho[m] * float(np.sum(t[: m + 1]))
    w = lambert_w0_of_exp(E[m + 1] + s + 1.0)
    c = (s + 1.0 - w) / (area * rho[m] * t[m])
    return min(max(c, 0.0), 1.0)


def kkt_residual(t, rho, area: float, m: int, c: float) -> float:
    """Stationarity residual of the watershed equation, relative to its size."""
    t, rho = _sorted_arrays(t, rho)
    _check_position(t, m)
    E = _tail_exponents(t, rho, area)
    S = float(np.sum(t[: m + 1]))
    lhs = area * rho[m] * (S - t[m] * c) + 1.0
    rhs = math.exp(E[m + 1] + area * t[m] * rho[m] * c)
    return (lhs - rhs) / max(1.0, rhs)


@dataclass(frozen=True)
class _SortedResult:
    c: np.ndarray
    case_tag: str
    watershed: int | None
    boundary: int | None
    f1: np.ndarray
    f0: np.ndarray


def solve_sorted(t, rho, area: float) -> _SortedResult:
    """Optimum for groups already sorted by strictly increasing ``rho``."""
    t, rho = _sorted_arrays(t, rho)
    M = len(t)
    f1v, f0v = watershed_conditions(t, rho, area)
    pos1 = f1v > POSITIVE_TOL
    pos0 = f0v > POSITIVE_TOL

    for m in range(M):
        if pos1[m] and pos0[m]:
            c = np.concatenate((np.zeros(m), [watershed_push_prob(t, rho, area, m)],
                                np.ones(M - m - 1)))
            return _SortedResult(c, FRACTIONAL, m, None, f1v, f0v)

    # boundary [0]*m + [1]*(M-m); m == 0 is all-ones, m == M is all-zeros
    for m in range(M + 1):
        low_ok = m == 0 or not pos1[m - 1]
        high_ok = m == M or not pos0[m]
        if low_ok and high_ok:
            c = np.concatenate((np.zeros(m), np.ones(M - m)))
            return _SortedResult(c, BOUNDARY, None, m, f1v, f0v)

    raise AnalyticError(
        "no watershed or boundary case matched; "
        f"f1={f1v.tolist()} f0={f0v.tolist()} t={t.tolist()} rho={rho.tolist()}"
    )


@dataclass(frozen=True)
class AnalyticSolution:
    """Closed-form optimum together with how it was obtained.

    ``order[k]`` lists the original group indices forming sorted position
    ``k`` (more than one when groups with equal ``rho`` were merged).  Inert
    groups do not appear in ``order``.  ``f1``/``f0`` are the watershed
    diagnostics of the sorted, merged instance.
    """

    strategy: np.ndarray
    gain: float
    case_tag: str
    watershed_index: int | None
    boundary_index: int | None
    order: tuple[tuple[int, ...], ...]
    merged_groups: tuple[tuple[int, ...], ...]
    t_sorted: np.ndarray
    rho_sorted: np.ndarray
    f1: np.ndarray
    f0: np.ndarray

    @property
    def watershed_groups(self) -> tuple[int, ...]:
        if self.watershed_index is None:
            return ()
        return self.order[self.watershed_index]

    @property
    def sort_permutation(self) -> tuple[int, ...]:
        return tuple(i for block in self.order for i in block)

    @property
    def dividing_position(self) -> float:
        """Number of unpushed sorted positions, counting a fraction for the watershed.

        ``m - c`` for a watershed at 1-based position ``m``, and ``m`` for the
        boundary strategy with ``m`` unpushed positions.  It grows as less is
        pushed, so it tracks where the dividing line sits.
        """
        if self.watershed_index is not None:
            block = self.order[self.watershed_index]
            return self.watershed_index + 1.0 - float(self.strategy[block[0]])
        return float(self.boundary_index)


def _merge_ties(t, rho):
    """Collapse runs of equal ``rho`` (already sorted) into single groups."""
    blocks: list[list[int]] = []
    for k in range(len(rho)):
        if blocks and rho_close(rho[blocks[-1][0]], rho[k]):
            blocks[-1].append(k)
        else:
            blocks.append([k])
    t_m = np.array([t[b].sum() for b in blocks])
    rho_m = np.array([rho[b].mean() for b in blocks])
    return blocks, t_m, rho_m


def solve_with_sharing(t, rho, area: float) -> AnalyticSolution:
    """Optimum of the shared-probability problem for arbitrary (unsorted) groups.

    Groups with ``t == 0`` are left at zero, equal ``rho`` values are merged
    and every merged group receives the super-group's probability.
    """
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    M = len(t)
    strategy = np.zeros(M)
    active = np.flatnonzero(t > 0)
    if active.size == 0:
        empty = np.zeros(0)
        return AnalyticSolution(strategy, 0.0, BOUNDARY, None, 0, (), (), empty,
                                empty, empty, empty)

    perm = active[np.argsort(rho[active], kind="stable")]
    blocks, t_s, rho_s = _merge_ties(t[perm], rho[perm])
    order = tuple(tuple(int(perm[k]) for k in b) for b in blocks)
    res = solve_sorted(t_s, rho_s, area)
    for k, members in enumerate(order):
        strategy[list(members)] = res.c[k]
    return AnalyticSolution(
        strategy=strategy,
        gain=shared_gain(t, rho, area, strategy),
        case_tag=res.case_tag,
        watershed_index=res.watershed,
        boundary_index=res.boundary,
        order=order,
        merged_groups=tuple(b for b in order if len(b) > 1),
        t_sorted=t_s,
        rho_sorted=rho_s,
        f1=res.f1,
        f0=res.f0,
    )


def _require_group_independent(config: SystemConfig) -> None:
    if not config.group_independent:
        bad = [i for i, g in enumerate(config.groups)
               if not rho_close(g.share_intra, g.share_inter)]
        raise ValueError(
            f"groups {bad} have share_intra != share_inter; the closed form only "
            "covers group-independent sharing (use the AGO solver instead)"
        )


def solve_group_independent(config: SystemConfig) -> AnalyticSolution:
    """Closed-form optimum for a group-independent instance, ties allowed."""
    _require_group_independent(config)
    return solve_with_sharing(config.t, config.rho_in, config.area)


def solve_nonuniform(config: SystemConfig) -> AnalyticSolution:
    """Closed-form optimum when every active group has a distinct ``rho``."""
    _require_group_independent(config)
    sol = solve_with_sharing(config.t, config.rho_in, config.area)
    if sol.merged_groups:
        raise ValueError(
            f"groups {list(sol.merged_groups)} share a sharing probability; "
            "use solve_group_independent for partially uniform instances"
        )
    return sol
