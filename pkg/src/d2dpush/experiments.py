"""Instance files, parameter sweeps and the AGO-vs-exhaustive comparison.

Instance documents are JSON::

    {
      "d2d_radius": 5.0,
      "groups": [
        {"density": 0.05, "request_prob": 0.4, "share_intra": 0.2, "share_inter": 0.2},
        ...
      ]
    }

An optional top-level ``"description"`` string and per-group ``"name"``
string are accepted and ignored.
"""
from __future__ import annotations

import json
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import jsonschema
import numpy as np

from .ago import AgoConfig, ago_solve
from .analytic import solve_group_independent
from .model import (ConfigError, GroupParams, SystemConfig, offloading_gain,
                    validate)
from .oracle import GridBudgetError, GridSpec, grid_search

__all__ = [
    "INSTANCE_SCHEMA",
    "InstanceError",
    "parse_instance",
    "serialize_instance",
    "load_instance",
    "set_parameter",
    "SweepSpec",
    "SOLVERS",
    "solve",
    "solution_header",
    "run_sweep",
    "random_instance",
    "comparison_header",
    "run_comparison",
    "fmt",
]

_PROB = {"type": "number", "minimum": 0, "maximum": 1}

INSTANCE_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["d2d_radius", "groups"],
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "d2d_radius": {"type": "number", "exclusiveMinimum": 0},
        "groups": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["density", "request_prob", "share_intra", "share_inter"],
                "additionalProperties": False,
                "properties": {
                    "name": {"type": "string"},
                    "density": {"type": "number", "minimum": 0},
                    "request_prob": _PROB,
                    "share_intra": _PROB,
                    "share_inter": _PROB,
                },
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft7Validator(INSTANCE_SCHEMA)


class InstanceError(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def _json_path(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "<document>"


def _schema_messages(doc) -> list[str]:
    msgs = []
    for err in sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        path = list(err.absolute_path)
        if err.validator == "required":
            name = re.search(r"'(.+?)' is a required property", err.message)
            if name:
                path.append(name.group(1))
                msgs.append(f"{_json_path(path)}: missing required field")
                continue
        msgs.append(f"{_json_path(path)}: {err.message}")
    return msgs


def parse_instance(text: str, allow_unusual_sharing: bool = False) -> SystemConfig:
    """Parse and validate a JSON instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError([f"malformed JSON: {exc}"]) from None
    msgs = _schema_messages(doc)
    if msgs:
        raise InstanceError(msgs)
    groups = tuple(
        GroupParams(float(g["density"]), float(g["request_prob"]),
                    float(g["share_intra"]), float(g["share_inter"]))
        for g in doc["groups"]
    )
    config = SystemConfig(groups, float(doc["d2d_radius"]), allow_unusual_sharing)
    try:
        return validate(config)
    except ConfigError as exc:
        raise InstanceError(exc.errors) from None


def serialize_instance(config: SystemConfig) -> str:
    doc = {
        "d2d_radius": config.d2d_radius,
        "groups": [
            {"density": g.density, "request_prob": g.request_prob,
             "share_intra": g.share_intra, "share_inter": g.share_inter}
            for g in config.groups
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def load_instance(path: str, allow_unusual_sharing: bool = False) -> SystemConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read(), allow_unusual_sharing)


# groups[<i>].<field>, where field "share" sets intra and inter together
_PATH_RE = re.compile(r"^groups\[(\d+)\]\.(density|request_prob|share_intra|share_inter|share)$")


def _parse_path(path: str, config: SystemConfig) -> tuple[int | None, str]:
    if path == "d2d_radius":
        return None, path
    m = _PATH_RE.match(path)
    if not m:
        raise ValueError(
            f"unknown sweep parameter {path!r}; use d2d_radius or "
            "groups[i].(density|request_prob|share_intra|share_inter|share)"
        )
    i = int(m.group(1))
    if i >= config.n_groups:
        raise ValueError(f"sweep parameter {path!r}: instance has only {config.n_groups} groups")
    return i, m.group(2)


def set_parameter(config: SystemConfig, path: str, value: float) -> SystemConfig:
    """Copy of ``config`` with one field replaced (not yet validated)."""
    i, name = _parse_path(path, config)
    if i is None:
        return SystemConfig(config.groups, float(value), config.allow_unusual_sharing)
    groups = list(config.groups)
    if name == "share":
        groups[i] = replace(groups[i], share_intra=float(value), share_inter=float(value))
    else:
        groups[i] = replace(groups[i], **{name: float(value)})
    return config.with_groups(groups)


SOLVERS = ("analytic", "ago", "oracle")


def fmt(x) -> str:
    """Locale-independent shortest round-trip text for CSV cells."""
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def solve(config: SystemConfig, solver: str, ago_opts: AgoConfig = AgoConfig(),
          grid: GridSpec = GridSpec()) -> tuple[np.ndarray, str]:
    """Run one solver; returns the strategy and a short metadata string."""
    if solver == "analytic":
        sol = solve_group_independent(config)
        meta = sol.case_tag
        if sol.watershed_groups:
            meta += " watershed=" + "+".join(str(i + 1) for i in sol.watershed_groups)
        return sol.strategy, meta
    if solver == "ago":
        c, trace = ago_solve(config, ago_opts)
        return c, f"iterations={trace.iterations_run}"
    if solver == "oracle":
        res = grid_search(config, grid)
        return res.strategy, f"eps_grid={res.eps_grid:.6g}"
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def solution_header(n_groups: int) -> list[str]:
    return (["solver"] + [f"c_{m + 1}" for m in range(n_groups)]
            + [f"P_{m + 1}" for m in range(n_groups)] + ["G", "meta", "error"])


def solution_row(config: SystemConfig, solver: str, ago_opts: AgoConfig,
                 grid: GridSpec) -> list[str]:
    M = config.n_groups
    try:
        c, meta = solve(config, solver, ago_opts, grid)
    except Exception as exc:  # reported in the row, the caller sets the exit code
        return [solver] + [""] * (2 * M + 2) + [f"{type(exc).__name__}: {exc}"]
    gb = offloading_gain(config, c)
    return ([solver] + [fmt(x) for x in c] + [fmt(x) for x in gb.per_group_success]
            + [fmt(gb.total_gain), meta, ""])


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    steps: int
    solver: str = "analytic"

    def check(self, config: SystemConfig) -> None:
        _parse_path(self.parameter, config)
        if self.start > self.stop:
            raise ValueError("sweep start must not exceed stop")
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; expected one of {SOLVERS}")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)


def _sweep_point(args) -> list[str]:
    config, sweep, value, ago_opts, grid = args
    try:
        point = validate(set_parameter(config, sweep.parameter, value))
    except ConfigError as exc:
        M = config.n_groups
        return [sweep.solver] + [""] * (2 * M + 2) + [f"ConfigError: {exc}"]
    return solution_row(point, sweep.solver, ago_opts, grid)


def run_sweep(config: SystemConfig, sweep: SweepSpec, ago_opts: AgoConfig = AgoConfig(),
              grid: GridSpec = GridSpec(), jobs: int = 1) -> tuple[list[str], list[list[str]]]:
    """Solve the instance at every sweep value; rows follow the sweep order."""
    sweep.check(config)
    header = ["index", "parameter", "value"] + solution_header(config.n_groups)
    values = sweep.values()
    tasks = [(config, sweep, float(v), ago_opts, grid) for v in values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    rows = [[str(k), sweep.parameter, fmt(float(v))] + r
            for k, (v, r) in enumerate(zip(values, results))]
    return header, rows


def random_instance(rng: np.random.Generator, n_groups: int, density: float = 0.05,
                    radius: float = 5.0) -> SystemConfig:
    """Random instance with the usual AGO benchmark distribution.

    ``w ~ U[0, 1]``, inter-group sharing ``~ U[0, 0.3]``, intra-group sharing
    ``~ U[0.7, 1]``; equal densities and radius.
    """
    groups = []
    for _ in range(n_groups):
        w = rng.uniform(0.0, 1.0)
        rho_o = rng.uniform(0.0, 0.3)
        rho_i = rng.uniform(0.7, 1.0)
        groups.append(GroupParams(density, w, rho_i, rho_o))
    return validate(SystemConfig(tuple(groups), radius))


def comparison_header(n_groups: int) -> list[str]:
    return (["instance", "ago_gain", "oracle_gain", "rel_gap", "eps_grid", "iterations"]
            + [f"ago_c_{m + 1}" for m in range(n_groups)]
            + [f"oracle_c_{m + 1}" for m in range(n_groups)] + ["error"])


def _compare_one(args) -> list[str]:
    k, config, ago_opts, grid = args
    M = config.n_groups
    try:
        c, trace = ago_solve(config, ago_opts)
        ores = grid_search(config, grid)
    except Exception as exc:
        return [str(k)] + [""] * (5 + 2 * M) + [f"{type(exc).__name__}: {exc}"]
    g_ago = trace.final_gain
    gap = (ores.gain - g_ago) / ores.gain if ores.gain > 0 else 0.0
    return ([str(k), fmt(g_ago), fmt(ores.gain), fmt(gap), fmt(ores.eps_grid),
             str(trace.iterations_run)]
            + [fmt(x) for x in c] + [fmt(x) for x in ores.strategy] + [""])


def run_comparison(n_instances: int, n_groups: int, seed: int,
                   ago_opts: AgoConfig = AgoConfig(), grid: GridSpec = GridSpec(),
                   jobs: int = 1) -> tuple[list[str], list[list[str]]]:
    """AGO against exhaustive search on random instances drawn from ``seed``."""
    if n_instances < 0:
        raise ValueError("number of instances must be non-negative")
    rng = np.random.default_rng(seed)
    configs = [random_instance(rng, n_groups) for _ in range(n_instances)]
    # fail before doing any work if the lattice is too large
    if configs:
        n = grid.points_per_axis
        if n**n_groups > grid.budget:
            raise GridBudgetError(
                f"lattice of {n}^{n_groups} points exceeds the budget {grid.budget:.3g}; "
                "use a coarser step or fewer groups"
            )
    tasks = [(k, cfg, ago_opts, grid) for k, cfg in enumerate(configs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_compare_one, tasks))
    else:
        rows = [_compare_one(t) for t in tasks]
    return comparison_header(n_groups), rows
