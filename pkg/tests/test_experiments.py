import json

import numpy as np
import pytest

from d2dpush.ago import AgoConfig
from d2dpush.experiments import (InstanceError, SweepSpec, comparison_header,
                                 load_instance, parse_instance,
                                 random_instance, run_comparison, run_sweep,
                                 serialize_instance, set_parameter, solve)
from d2dpush.oracle import GridBudgetError, GridSpec

from conftest import make_config

DOC = {
    "d2d_radius": 5.0,
    "groups": [
        {"density": 0.05, "request_prob": 0.4, "share_intra": 0.1, "share_inter": 0.1},
        {"density": 0.05, "request_prob": 0.6, "share_intra": 0.25, "share_inter": 0.25},
    ],
}


def test_round_trip():
    cfg = parse_instance(json.dumps(DOC))
    assert parse_instance(serialize_instance(cfg)) == cfg
    assert cfg.n_groups == 2 and cfg.t[1] == pytest.approx(0.03)


@pytest.mark.parametrize("mutate,needle", [
    (lambda d: d.pop("d2d_radius"), "d2d_radius: missing required field"),
    (lambda d: d["groups"][1].pop("share_inter"), "groups[1].share_inter: missing required field"),
    (lambda d: d["groups"][0].update(request_prob=1.5), "groups[0].request_prob"),
    (lambda d: d["groups"][0].update(density="a lot"), "groups[0].density"),
    (lambda d: d.update(extra=1), "<document>"),
    (lambda d: d.update(d2d_radius=-1), "d2d_radius"),
    (lambda d: d["groups"][0].update(share_inter=0.5), "groups[0].share_inter: 0.5 exceeds share_intra"),
])
def test_errors_name_the_field(mutate, needle):
    doc = json.loads(json.dumps(DOC))
    mutate(doc)
    with pytest.raises(InstanceError) as exc:
        parse_instance(json.dumps(doc))
    assert any(needle in m for m in exc.value.errors), exc.value.errors


def test_malformed_and_unusual():
    with pytest.raises(InstanceError, match="malformed JSON"):
        parse_instance("{not json")
    doc = json.loads(json.dumps(DOC))
    doc["groups"][0]["share_inter"] = 0.5
    assert parse_instance(json.dumps(doc), allow_unusual_sharing=True).rho_out[0] == 0.5


def test_case_files_load():
    for name in ("baseline", "request_sweep", "sharing_sweep", "general3"):
        cfg = load_instance(f"cases/{name}.json")
        assert cfg.n_groups >= 2


def test_set_parameter():
    cfg = parse_instance(json.dumps(DOC))
    assert set_parameter(cfg, "d2d_radius", 7.0).d2d_radius == 7.0
    g = set_parameter(cfg, "groups[0].share", 0.3).groups[0]
    assert g.share_intra == g.share_inter == 0.3
    assert set_parameter(cfg, "groups[1].request_prob", 0.1).groups[1].request_prob == 0.1
    with pytest.raises(ValueError, match="unknown sweep parameter"):
        set_parameter(cfg, "groups[0].colour", 1.0)
    with pytest.raises(ValueError, match="only 2 groups"):
        set_parameter(cfg, "groups[5].density", 1.0)


def test_sweep_rows_and_errors():
    cfg = parse_instance(json.dumps(DOC))
    header, rows = run_sweep(cfg, SweepSpec("groups[0].share", 0.05, 0.5, 10))
    assert header[:4] == ["index", "parameter", "value", "solver"]
    assert len(rows) == 10 and all(r[-1] == "" for r in rows)
    # an out-of-range point is reported in its row, the others still run
    header, rows = run_sweep(cfg, SweepSpec("groups[0].request_prob", 0.5, 1.5, 3))
    assert rows[0][-1] == "" and rows[2][-1].startswith("ConfigError")


def test_sweep_degenerate_range_and_checks():
    cfg = parse_instance(json.dumps(DOC))
    _, rows = run_sweep(cfg, SweepSpec("d2d_radius", 5.0, 5.0, 3))
    assert len({tuple(r[3:]) for r in rows}) == 1
    with pytest.raises(ValueError):
        run_sweep(cfg, SweepSpec("d2d_radius", 6.0, 5.0, 3))
    with pytest.raises(ValueError):
        run_sweep(cfg, SweepSpec("d2d_radius", 5.0, 6.0, 1))
    with pytest.raises(ValueError):
        run_sweep(cfg, SweepSpec("d2d_radius", 5.0, 6.0, 3, solver="magic"))


def test_solver_dispatch():
    cfg = make_config((0.4, 0.6), (0.5, 0.25))
    ca, meta = solve(cfg, "analytic")
    co, _ = solve(cfg, "oracle", grid=GridSpec(0.01))
    cg, _ = solve(cfg, "ago", AgoConfig(max_iterations=20))
    assert np.max(np.abs(ca - co)) <= 0.011
    assert np.max(np.abs(ca - cg)) <= 1e-4
    assert meta.startswith("fractional-watershed")


def test_comparison():
    header, rows = run_comparison(0, 3, seed=1)
    assert header == comparison_header(3) and rows == []
    header, rows = run_comparison(2, 2, seed=5, grid=GridSpec(0.02))
    assert len(rows) == 2 and all(r[-1] == "" for r in rows)
    _, again = run_comparison(2, 2, seed=5, grid=GridSpec(0.02))
    assert rows == again
    with pytest.raises(GridBudgetError):
        run_comparison(1, 5, seed=1, grid=GridSpec(0.01))


def test_random_instance_distribution():
    rng = np.random.default_rng(0)
    cfgs = [random_instance(rng, 3) for _ in range(50)]
    ro = np.concatenate([c.rho_out for c in cfgs])
    ri = np.concatenate([c.rho_in for c in cfgs])
    assert ro.min() >= 0 and ro.max() <= 0.3
    assert ri.min() >= 0.7 and ri.max() <= 1.0
