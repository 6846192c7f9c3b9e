"""Optimal proactive content pushing for D2D offloading.

Submodules: :mod:`model` (gain and success probabilities), :mod:`analytic`
(closed form for group-independent sharing), :mod:`ago` (alternating group
optimisation), :mod:`oracle` (exhaustive lattice search), :mod:`mcsim`
(Monte-Carlo check) and :mod:`experiments` (instance files, sweeps).
"""
from .ago import AgoConfig, AgoTrace, ago_solve
from .analytic import AnalyticSolution, solve_group_independent, solve_with_sharing
from .lambertw import lambert_w0
from .model import (ConfigError, GroupParams, SystemConfig, d2d_success_prob,
                    offloading_gain, validate)
from .oracle import GridSpec, grid_search

__version__ = "0.1.0"

__all__ = [
    "AgoConfig", "AgoTrace", "ago_solve",
    "AnalyticSolution", "solve_group_independent", "solve_with_sharing",
    "lambert_w0",
    "ConfigError", "GroupParams", "SystemConfig", "d2d_success_prob",
    "offloading_gain", "validate",
    "GridSpec", "grid_search",
]
