import io
import math

import numpy as np
import pytest

from d2dpush.model import gain_batch
from d2dpush.oracle import GridBudgetError, GridSpec, grid_search, grid_slack, write_lattice_csv

from conftest import make_config, random_general_config


def test_axis_points():
    assert GridSpec(0.1).points_per_axis == 11
    assert GridSpec(0.001).points_per_axis == 1001
    assert GridSpec(0.3).axis().tolist()[-1] == pytest.approx(0.9)
    assert GridSpec(1.0).axis().tolist() == [0.0, 1.0]
    with pytest.raises(ValueError):
        GridSpec(0.0)
    with pytest.raises(ValueError):
        GridSpec(1.5)


def test_matches_naive_loop():
    rng = np.random.default_rng(1)
    cfg = random_general_config(rng, 3)
    res = grid_search(cfg, GridSpec(0.05))
    axis = GridSpec(0.05).axis()
    best, arg = -1.0, None
    for a in axis:
        for b in axis:
            for c in axis:
                g = gain_batch(cfg, np.array([a, b, c]))
                if g > best:
                    best, arg = g, (a, b, c)
    assert res.gain == best
    assert res.strategy.tolist() == list(arg)
    assert res.evaluations == 21**3


def test_lexicographic_tie_break():
    # two identical groups: (x, y) and (y, x) tie, the smaller first coordinate wins
    cfg = make_config((0.5, 0.5), (0.3, 0.3))
    res = grid_search(cfg, GridSpec(0.01))
    assert res.strategy[0] <= res.strategy[1]


def test_inert_axes_pinned():
    cfg = make_config((0.0, 0.5), (0.9, 0.9), (0.1, 0.1))
    res = grid_search(cfg, GridSpec(0.01))
    assert res.strategy[0] == 0.0
    assert res.evaluations == 101
    cfg = make_config((0.0,), (0.5,))
    assert grid_search(cfg).gain == 0.0


def test_budget():
    cfg = random_general_config(np.random.default_rng(2), 4)
    with pytest.raises(GridBudgetError):
        grid_search(cfg, GridSpec(0.01, budget=10**6))


def test_slack_formula():
    cfg = make_config((0.4, 0.6), (0.5, 0.25))
    t = cfg.t
    T = t.sum()
    L = math.sqrt(sum((tm + cfg.area * T * 0.5 * T) ** 2 for tm in t))
    assert grid_slack(cfg, 0.01) == pytest.approx(L * 0.01 * math.sqrt(2), rel=1e-14)


def test_slack_bounds_gap_to_fine_grid():
    rng = np.random.default_rng(3)
    for _ in range(5):
        cfg = random_general_config(rng, 2)
        coarse = grid_search(cfg, GridSpec(0.05))
        fine = grid_search(cfg, GridSpec(0.001))
        assert fine.gain - coarse.gain <= coarse.eps_grid


def test_lattice_csv():
    cfg = make_config((0.4, 0.6), (0.5, 0.25))
    buf = io.StringIO()
    n = write_lattice_csv(cfg, GridSpec(0.5), buf)
    lines = buf.getvalue().splitlines()
    assert n == 9 and len(lines) == 10
    assert lines[0] == "c_1,c_2,gain"
    assert lines[1] == "0.0,0.0,0.0"
