import csv
import io
import json

import pytest

from d2dpush.cli import main

BASE = "cases/baseline.json"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, list(csv.reader(io.StringIO(out))), err


def test_gain(capsys):
    code, rows, _ = run(capsys, "gain", "--instance", BASE, "--strategy", "0,1")
    assert code == 0
    assert rows[0] == ["solver", "c_1", "c_2", "P_1", "P_2", "G", "meta", "error"]
    assert float(rows[1][5]) == pytest.approx(0.017303400716787525, rel=1e-13)


def test_solvers(capsys):
    code, rows, _ = run(capsys, "solve-analytic", "--instance", "cases/request_sweep.json")
    assert code == 0 and float(rows[1][1]) == pytest.approx(0.025284770320768422, rel=1e-12)
    code, rows, _ = run(capsys, "solve-ago", "--instance", "cases/general3.json",
                        "--iters", "3", "--init", "random", "--seed", "4")
    assert code == 0 and rows[1][0] == "ago"
    code, rows, _ = run(capsys, "oracle", "--instance", BASE, "--step", "0.05")
    assert code == 0 and rows[1][-2].startswith("eps_grid=")


def test_analytic_on_general_instance_is_error_row(capsys):
    code, rows, _ = run(capsys, "solve-analytic", "--instance", "cases/general3.json")
    assert code == 1 and "share_intra != share_inter" in rows[1][-1]


def test_bad_instance(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"groups": [{"density": 0.05}]}))
    code, _, err = run(capsys, "gain", "--instance", str(bad), "--strategy", "0")
    assert code == 2
    assert "d2d_radius: missing required field" in err
    assert "groups[0].request_prob: missing required field" in err


def test_bad_strategy_and_missing_file(capsys):
    code, _, err = run(capsys, "gain", "--instance", BASE, "--strategy", "0.5")
    assert code == 2 and "shape" in err
    code, _, err = run(capsys, "gain", "--instance", "nope.json", "--strategy", "0")
    assert code == 2 and "nope.json" in err


def test_simulate_and_output_file(capsys, tmp_path):
    out = tmp_path / "sim.csv"
    trials = tmp_path / "trials.csv"
    code = main(["simulate", "--instance", BASE, "--strategy", "0,0.7", "--trials", "5",
                 "--seed", "3", "--region-side", "60", "--output", str(out),
                 "--trials-csv", str(trials)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["quantity", "c", "model", "estimate", "se", "scored_requesters", "successes"]
    assert [r[0] for r in rows[1:]] == ["P_1", "P_2", "G"]
    assert len(trials.read_text().splitlines()) == 1 + 5 * 2


def test_sweep(capsys):
    code, rows, _ = run(capsys, "sweep", "--instance", "cases/sharing_sweep.json",
                        "--param", "groups[0].share", "--from", "0.05", "--to", "0.5",
                        "--steps", "46")
    assert code == 0 and len(rows) == 47
    code, rows, _ = run(capsys, "sweep", "--instance", BASE, "--param", "groups[0].density",
                        "--from", "-1", "--to", "0", "--steps", "2")
    assert code == 1 and rows[1][-1].startswith("ConfigError")


def test_compare(capsys):
    code, rows, _ = run(capsys, "compare", "--n", "0", "--groups", "3", "--seed", "1")
    assert code == 0 and len(rows) == 1
    code, a, _ = run(capsys, "compare", "--n", "2", "--groups", "2", "--seed", "9", "--step", "0.05")
    _, b, _ = run(capsys, "compare", "--n", "2", "--groups", "2", "--seed", "9", "--step", "0.05")
    assert code == 0 and a == b
    code, _, err = run(capsys, "compare", "--n", "1", "--groups", "6", "--seed", "1")
    assert code == 2 and "budget" in err


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["gain"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        main(["compare", "--seed", "-1"])
