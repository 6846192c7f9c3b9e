"""Alternative group optimisation for distinct intra/inter sharing.

The general gain is nonconvex in the full strategy but concave in any one
coordinate once the others are fixed.  AGO sweeps the groups in input order
and replaces each ``c_m`` by its exact one-dimensional maximiser, found as
the clamped root of the strictly decreasing function ``g_m`` (the scaled
derivative of the gain in ``c_m``).  Every group update can only raise the
gain and the gain is bounded by ``sum t``, so the trace is monotone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytic import solve_with_sharing
from .model import SystemConfig, as_strategy, offloading_gain

__all__ = [
    "AgoConfig",
    "AgoTrace",
    "ReducedTerms",
    "INIT_MODES",
    "reduced_gain_terms",
    "reduced_gain",
    "g_m",
    "inner_solve",
    "initial_strategy",
    "ago_solve",
]

INIT_MODES = ("zeros", "cout", "cin", "random", "explicit")


@dataclass(frozen=True)
class AgoConfig:
    max_iterations: int = 2
    bisection_tolerance: float = 1e-10
    bisection_max_steps: int = 60
    init: str = "cout"
    seed: int | None = None
    init_vector: Sequence[float] | None = None
    early_exit_tol: float = 1e-12

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not self.bisection_tolerance > 0:
            raise ValueError("bisection_tolerance must be positive")
        if self.bisection_max_steps < 1:
            raise ValueError("bisection_max_steps must be at least 1")
        if self.init not in INIT_MODES:
            raise ValueError(f"unknown init mode {self.init!r}; expected one of {INIT_MODES}")
        if self.init == "explicit" and self.init_vector is None:
            raise ValueError("init='explicit' needs init_vector")
        if self.init == "random" and self.seed is None:
            raise ValueError("init='random' needs a seed")


@dataclass
class AgoTrace:
    initial_gain: float
    gains: list[list[float]] = field(default_factory=list)
    final_strategy: np.ndarray | None = None
    iterations_run: int = 0

    @property
    def flat_gains(self) -> list[float]:
        """Initial gain followed by the gain after every single group update."""
        return [self.initial_gain] + [g for it in self.gains for g in it]

    @property
    def final_gain(self) -> float:
        return self.flat_gains[-1]

    def is_monotone(self, slack: float = 1e-12) -> bool:
        seq = self.flat_gains
        return all(b >= a - slack for a, b in zip(seq, seq[1:]))


@dataclass(frozen=True)
class ReducedTerms:
    """Pieces of the gain seen from group ``m`` with every other ``c_k`` frozen.

    ``Q`` and ``Phi`` are full-length arrays whose entry ``m`` is zero.
    """

    m: int
    phi: float
    Q: np.ndarray
    Phi: np.ndarray
    I: float


def reduced_gain_terms(config: SystemConfig, c, m: int) -> ReducedTerms:
    """``phi_m``, ``Q_k``, ``Phi_k`` and ``I_m`` for the current strategy; ``c[m]`` is ignored."""
    M = config.n_groups
    if not 0 <= m < M:
        raise IndexError(f"group index {m} out of range for {M} groups")
    c = np.array(c, dtype=float)
    c[m] = 0.0
    B, t = config.area, config.t
    out = B * t * config.rho_out * c
    phi = float(np.sum(np.delete(out, m)))
    Q = t * (1.0 - c)
    Q[m] = 0.0
    Phi = np.zeros(M)
    for k in range(M):
        if k == m:
            continue
        others = [q for q in range(M) if q != m and q != k]
        Phi[k] = float(np.sum(out[others])) + B * t[k] * config.rho_in[k] * c[k]
    I = float(np.sum(Q * np.exp(-Phi)))
    return ReducedTerms(m, phi, Q, Phi, I)


def reduced_gain(config: SystemConfig, terms: ReducedTerms, x: float) -> float:
    """Total gain as a function of ``c_m = x`` alone."""
    m, B = terms.m, config.area
    tm = config.t[m]
    own = tm * (1.0 - x) * -math.expm1(-B * tm * config.rho_in[m] * x - terms.phi)
    mask = np.arange(config.n_groups) != m
    b = B * tm * config.rho_out[m]
    rest = float(np.sum(terms.Q[mask] * -np.expm1(-b * x - terms.Phi[mask])))
    return own + rest


def g_m(config: SystemConfig, terms: ReducedTerms, x: float) -> float:
    """Derivative of :func:`reduced_gain` divided by ``t_m``; strictly decreasing on [0, 1]."""
    m, B = terms.m, config.area
    tm = config.t[m]
    a = B * tm * config.rho_in[m]
    b = B * tm * config.rho_out[m]
    return ((1.0 + a * (1.0 - x)) * math.exp(-a * x - terms.phi)
            + B * terms.I * config.rho_out[m] * math.exp(-b * x) - 1.0)


def inner_solve(config: SystemConfig, c, m: int, opts: AgoConfig = AgoConfig()) -> float:
    """Exact maximiser of the gain over ``c_m`` with the other groups fixed."""
    if config.t[m] == 0.0:
        return 0.0
    terms = reduced_gain_terms(config, c, m)
    g0 = g_m(config, terms, 0.0)
    if g0 <= 0.0:
        return 0.0
    g1 = g_m(config, terms, 1.0)
    if g1 >= 0.0:
        return 1.0

    lo, hi, glo, ghi = 0.0, 1.0, g0, g1
    for _ in range(opts.bisection_max_steps):
        if hi - lo <= opts.bisection_tolerance:
            break
        mid = 0.5 * (lo + hi)
        gm = g_m(config, terms, mid)
        if gm > 0.0:
            lo, glo = mid, gm
        elif gm < 0.0:
            hi, ghi = mid, gm
        else:
            return mid
    if not (glo > 0.0 > ghi):
        raise RuntimeError(f"bisection lost its bracket for group {m}: g({lo})={glo}, g({hi})={ghi}")
    # one secant step inside the final bracket; g is smooth there so this
    # cuts the residual well below the bracket width times |g'|
    return lo + glo * (hi - lo) / (glo - ghi)


def initial_strategy(config: SystemConfig, opts: AgoConfig) -> np.ndarray:
    M = config.n_groups
    if opts.init == "zeros":
        c = np.zeros(M)
    elif opts.init == "cout":
        c = solve_with_sharing(config.t, config.rho_out, config.area).strategy
    elif opts.init == "cin":
        c = solve_with_sharing(config.t, config.rho_in, config.area).strategy
    elif opts.init == "random":
        c = np.random.default_rng(opts.seed).random(M)
    else:
        c = as_strategy(config, opts.init_vector).copy()
    c = np.array(c, dtype=float)
    c[config.inert] = 0.0
    return c


def ago_solve(config: SystemConfig, opts: AgoConfig = AgoConfig()) -> tuple[np.ndarray, AgoTrace]:
    """Cyclic exact group updates; returns the final strategy and the gain trace."""
    c = initial_strategy(config, opts)
    trace = AgoTrace(initial_gain=offloading_gain(config, c).total_gain)
    prev = trace.initial_gain
    for _ in range(opts.max_iterations):
        sweep = []
        for m in range(config.n_groups):
            c[m] = inner_solve(config, c, m, opts)
            sweep.append(offloading_gain(config, c).total_gain)
        trace.gains.append(sweep)
        trace.iterations_run += 1
        if sweep[-1] - prev < opts.early_exit_tol:
            break
        prev = sweep[-1]
    trace.final_strategy = c.copy()
    return c, trace
