"""System model for D2D-assisted content pushing.

Users are split into groups; each group has a Poisson density, a request
probability for the reference content and two sharing probabilities (towards
users of the same group and towards users of other groups).  A pushing
strategy assigns each group the probability that the base station pushes the
content to one of its users.  Everything here is a pure function of an
immutable :class:`SystemConfig` and a strategy vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

__all__ = [
    "GroupParams",
    "SystemConfig",
    "ConfigError",
    "GainBreakdown",
    "validate",
    "as_strategy",
    "ue_a_density",
    "ue_t_density",
    "sharing_densities",
    "d2d_success_prob",
    "success_probs",
    "offloading_gain",
    "gain_batch",
    "shared_gain",
    "rho_close",
    "RHO_REL_TOL",
]

# Relative tolerance used whenever two sharing probabilities are compared for
# equality (group-independent detection, tie merging).
RHO_REL_TOL = 1e-9


def rho_close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=RHO_REL_TOL, abs_tol=0.0)


class ConfigError(ValueError):
    """Raised when an instance violates the model's domain constraints.

    ``errors`` holds one message per violation, each prefixed by a field path.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class GroupParams:
    density: float
    request_prob: float
    share_intra: float
    share_inter: float

    @property
    def request_density(self) -> float:
        return self.density * self.request_prob


@dataclass(frozen=True)
class SystemConfig:
    groups: tuple[GroupParams, ...]
    d2d_radius: float
    allow_unusual_sharing: bool = field(default=False, compare=False)

    def __post_init__(self):
        # accept any sequence but store a tuple so the config stays hashable
        object.__setattr__(self, "groups", tuple(self.groups))

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @cached_property
    def area(self) -> float:
        """Cooperation area pi * r**2."""
        return math.pi * self.d2d_radius**2

    @cached_property
    def t(self) -> np.ndarray:
        """Request density per group (interested users per unit area)."""
        arr = np.array([g.density * g.request_prob for g in self.groups], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def rho_in(self) -> np.ndarray:
        arr = np.array([g.share_intra for g in self.groups], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def rho_out(self) -> np.ndarray:
        arr = np.array([g.share_inter for g in self.groups], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def inert(self) -> np.ndarray:
        """Groups nobody in which requests the content; their push is forced to 0."""
        arr = self.t == 0.0
        arr.setflags(write=False)
        return arr

    @property
    def group_independent(self) -> bool:
        return all(rho_close(g.share_intra, g.share_inter) for g in self.groups)

    def with_groups(self, groups: Sequence[GroupParams]) -> "SystemConfig":
        return SystemConfig(tuple(groups), self.d2d_radius, self.allow_unusual_sharing)


def _check_prob(value, path: str, errors: list[str]) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
        errors.append(f"{path}: must be a finite number")
    elif not 0.0 <= value <= 1.0:
        errors.append(f"{path}: {value!r} out of range [0, 1]")


def validate(config: SystemConfig, allow_unusual_sharing: bool | None = None) -> SystemConfig:
    """Check every domain constraint and return the config, or raise :class:`ConfigError`.

    ``share_inter > share_intra`` is rejected unless ``allow_unusual_sharing``
    is set (either here or on the config itself).
    """
    if allow_unusual_sharing is None:
        allow_unusual_sharing = config.allow_unusual_sharing
    errors: list[str] = []
    if not config.groups:
        errors.append("groups: at least one group is required")
    r = config.d2d_radius
    if not isinstance(r, (int, float)) or isinstance(r, bool) or not math.isfinite(r) or r <= 0:
        errors.append(f"d2d_radius: {r!r} must be a positive finite number")
    for i, g in enumerate(config.groups):
        base = f"groups[{i}]"
        d = g.density
        if not isinstance(d, (int, float)) or isinstance(d, bool) or not math.isfinite(d):
            errors.append(f"{base}.density: must be a finite number")
        elif d < 0:
            errors.append(f"{base}.density: {d!r} is negative")
        _check_prob(g.request_prob, f"{base}.request_prob", errors)
        _check_prob(g.share_intra, f"{base}.share_intra", errors)
        _check_prob(g.share_inter, f"{base}.share_inter", errors)
        if (
            not allow_unusual_sharing
            and isinstance(g.share_inter, (int, float))
            and isinstance(g.share_intra, (int, float))
            and g.share_inter > g.share_intra
            and not rho_close(g.share_inter, g.share_intra)
        ):
            errors.append(
                f"{base}.share_inter: {g.share_inter!r} exceeds share_intra "
                f"{g.share_intra!r} (pass allow_unusual_sharing to accept)"
            )
    if errors:
        raise ConfigError(errors)
    if not np.all(np.isfinite(config.t)):
        raise ConfigError(["groups: request density is not finite"])
    if allow_unusual_sharing != config.allow_unusual_sharing:
        config = SystemConfig(config.groups, config.d2d_radius, allow_unusual_sharing)
    return config


def as_strategy(config: SystemConfig, c) -> np.ndarray:
    """Coerce ``c`` to a float vector and check it is a valid pushing strategy."""
    arr = np.asarray(c, dtype=float)
    if arr.shape != (config.n_groups,):
        raise ValueError(
            f"strategy has shape {arr.shape}, expected ({config.n_groups},)"
        )
    if not np.all((arr >= 0.0) & (arr <= 1.0)):
        raise ValueError(f"strategy entries must lie in [0, 1], got {arr.tolist()}")
    return arr


def _check_index(config: SystemConfig, m: int) -> None:
    if not 0 <= m < config.n_groups:
        raise IndexError(f"group index {m} out of range for {config.n_groups} groups")


def ue_a_density(config: SystemConfig, c, m: int) -> float:
    """Density of users in group ``m`` that are interested and were pushed."""
    _check_index(config, m)
    c = as_strategy(config, c)
    return float(config.t[m] * c[m])


def ue_t_density(config: SystemConfig, c, m: int) -> float:
    """Density of interested users in group ``m`` that were not pushed."""
    _check_index(config, m)
    c = as_strategy(config, c)
    return float(config.t[m] * (1.0 - c[m]))


def sharing_densities(config: SystemConfig, c, m: int) -> tuple[float, float]:
    """Densities of willing intra-group and inter-group holders seen by group ``m``."""
    _check_index(config, m)
    c = as_strategy(config, c)
    intra = config.t[m] * config.rho_in[m] * c[m]
    out = config.t * config.rho_out * c
    inter = float(np.sum(np.delete(out, m)))
    return float(intra), inter


def _exponents(config: SystemConfig, C: np.ndarray) -> np.ndarray:
    """B * (L_m + O_m) for every group and every strategy row of ``C``."""
    t, B = config.t, config.area
    M = config.n_groups
    cross = np.ones((M, M)) - np.eye(M)
    # O_m sums over k != m directly so no subtraction can leave a negative residue
    inter = (C * (t * config.rho_out)) @ cross
    intra = C * (t * config.rho_in)
    return B * (intra + inter)


def success_probs(config: SystemConfig, c) -> np.ndarray:
    """D2D success probability for a requesting user of each group."""
    c = as_strategy(config, c)
    return -np.expm1(-_exponents(config, c))


def d2d_success_prob(config: SystemConfig, c, m: int) -> float:
    _check_index(config, m)
    return float(success_probs(config, c)[m])


@dataclass(frozen=True)
class GainBreakdown:
    per_group_gain: np.ndarray
    total_gain: float
    per_group_success: np.ndarray
    ue_t_density: np.ndarray
    ue_a_density: np.ndarray


def offloading_gain(config: SystemConfig, c) -> GainBreakdown:
    """Expected offloaded copies per unit area, with its per-group pieces."""
    c = as_strategy(config, c)
    t = config.t
    P = -np.expm1(-_exponents(config, c))
    n = t * (1.0 - c)
    Gm = n * P
    return GainBreakdown(
        per_group_gain=Gm,
        total_gain=float(np.sum(Gm)),
        per_group_success=P,
        ue_t_density=n,
        ue_a_density=t * c,
    )


def gain_batch(config: SystemConfig, C: np.ndarray) -> np.ndarray:
    """Total gain for a stack of strategies ``C`` of shape (..., M)."""
    C = np.asarray(C, dtype=float)
    P = -np.expm1(-_exponents(config, C))
    return np.sum(config.t * (1.0 - C) * P, axis=-1)


def shared_gain(t, rho, area: float, c) -> float:
    """Gain when every group shares with everybody at the same probability.

    ``(sum t (1 - c)) * (1 - exp(-B sum t rho c))``; equal to
    :func:`offloading_gain` whenever ``share_intra == share_inter``.
    """
    t = np.asarray(t, dtype=float)
    c = np.asarray(c, dtype=float)
    rho = np.asarray(rho, dtype=float)
    return float(np.sum(t * (1.0 - c)) * -math.expm1(-area * float(np.sum(t * rho * c))))
