"""Command-line front end.

    d2dpush gain --instance cases/request_sweep.json --strategy 0,0.7
    d2dpush solve-analytic --instance cases/sharing_sweep.json
    d2dpush solve-ago --instance cases/general3.json --iters 2 --init cout
    d2dpush oracle --instance cases/request_sweep.json --step 0.001
    d2dpush simulate --instance cases/request_sweep.json --strategy 0,0.7 --trials 1000 --seed 1
    d2dpush sweep --instance cases/sharing_sweep.json --param 'groups[0].share' --from 0.05 --to 0.5 --steps 46
    d2dpush compare --n 30 --groups 3 --seed 1 --step 0.01

Every command writes CSV to ``--output`` (stdout by default).  The exit code
is 1 when any row carries an error and 2 for usage or input problems.
"""
from __future__ import annotations

import argparse
import csv
import sys
from contextlib import contextmanager

from .ago import INIT_MODES, AgoConfig
from .experiments import (InstanceError, SweepSpec, fmt, load_instance,
                          parse_instance, run_comparison, run_sweep,
                          solution_header, solution_row)
from .mcsim import SimSpec, run_dissemination
from .model import as_strategy, offloading_gain
from .oracle import GridSpec, write_lattice_csv

__all__ = ["main", "build_parser"]


def _strategy_arg(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"strategy must be comma-separated numbers, got {text!r}")


def _seed_arg(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="d2dpush", description="Optimal content pushing for D2D offloading")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True):
        if instance:
            sp.add_argument("--instance", required=True, help="JSON instance file, or - for stdin")
            sp.add_argument("--allow-unusual-sharing", action="store_true",
                            help="accept share_inter > share_intra")
        sp.add_argument("--output", default="-", help="CSV destination (default stdout)")

    def ago_flags(sp):
        sp.add_argument("--iters", type=int, default=2, help="outer AGO iterations")
        sp.add_argument("--init", choices=[m for m in INIT_MODES if m != "explicit"], default="cout")
        sp.add_argument("--seed", type=_seed_arg, default=None, help="seed for --init random")

    sp = sub.add_parser("gain", help="evaluate the offloading gain of a strategy")
    common(sp)
    sp.add_argument("--strategy", type=_strategy_arg, required=True)

    sp = sub.add_parser("solve-analytic", help="closed-form optimum (group-independent sharing)")
    common(sp)

    sp = sub.add_parser("solve-ago", help="alternative group optimisation")
    common(sp)
    ago_flags(sp)

    sp = sub.add_parser("oracle", help="exhaustive lattice search")
    common(sp)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--lattice-csv", default=None, help="also dump every lattice point here")

    sp = sub.add_parser("simulate", help="Monte-Carlo dissemination on a Poisson layout")
    common(sp)
    sp.add_argument("--strategy", type=_strategy_arg, required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=_seed_arg, default=0)
    sp.add_argument("--region-side", type=float, default=200.0)
    sp.add_argument("--guard-margin", type=float, default=None)
    sp.add_argument("--trials-csv", default=None, help="also dump per-trial tallies here")

    sp = sub.add_parser("sweep", help="solve along a one-parameter sweep")
    common(sp)
    sp.add_argument("--param", required=True, help="e.g. groups[0].request_prob or groups[0].share")
    sp.add_argument("--from", dest="start", type=float, required=True)
    sp.add_argument("--to", dest="stop", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--solver", choices=["analytic", "ago", "oracle"], default="analytic")
    sp.add_argument("--step", type=float, default=0.01, help="lattice step for --solver oracle")
    sp.add_argument("--jobs", type=int, default=1)
    ago_flags(sp)

    sp = sub.add_parser("compare", help="AGO against exhaustive search on random instances")
    common(sp, instance=False)
    sp.add_argument("--n", type=int, default=30, help="number of random instances")
    sp.add_argument("--groups", type=int, default=3)
    sp.add_argument("--seed", type=_seed_arg, required=True)
    sp.add_argument("--step", type=float, default=0.01)
    sp.add_argument("--iters", type=int, default=2)
    sp.add_argument("--init", choices=[m for m in INIT_MODES if m not in ("explicit", "random")],
                    default="cout")
    sp.add_argument("--jobs", type=int, default=1)
    return p


@contextmanager
def _open_out(path: str):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _write(path: str, header, rows) -> None:
    with _open_out(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _load(args):
    if args.instance == "-":
        return parse_instance(sys.stdin.read(), args.allow_unusual_sharing)
    return load_instance(args.instance, args.allow_unusual_sharing)


def _ago_opts(args) -> AgoConfig:
    return AgoConfig(max_iterations=args.iters, init=args.init,
                     seed=getattr(args, "seed", None))


def _run(args) -> int:
    if args.command == "compare":
        header, rows = run_comparison(args.n, args.groups, args.seed,
                                      AgoConfig(max_iterations=args.iters, init=args.init),
                                      GridSpec(args.step), jobs=args.jobs)
        _write(args.output, header, rows)
        return int(any(r[-1] for r in rows))

    config = _load(args)
    M = config.n_groups

    if args.command == "gain":
        c = as_strategy(config, args.strategy)
        gb = offloading_gain(config, c)
        row = (["given"] + [fmt(x) for x in c] + [fmt(x) for x in gb.per_group_success]
               + [fmt(gb.total_gain), "", ""])
        _write(args.output, solution_header(M), [row])
        return 0

    if args.command in ("solve-analytic", "solve-ago", "oracle"):
        solver = {"solve-analytic": "analytic", "solve-ago": "ago", "oracle": "oracle"}[args.command]
        ago = _ago_opts(args) if solver == "ago" else AgoConfig()
        grid = GridSpec(args.step) if solver == "oracle" else GridSpec()
        if solver == "oracle" and args.lattice_csv:
            with open(args.lattice_csv, "w", newline="", encoding="utf-8") as fh:
                write_lattice_csv(config, grid, fh)
        row = solution_row(config, solver, ago, grid)
        _write(args.output, solution_header(M), [row])
        return int(bool(row[-1]))

    if args.command == "simulate":
        c = as_strategy(config, args.strategy)
        spec = SimSpec(trials=args.trials, seed=args.seed, region_side=args.region_side,
                       guard_margin=args.guard_margin)
        if args.trials_csv:
            with open(args.trials_csv, "w", newline="", encoding="utf-8") as fh:
                res = run_dissemination(config, c, spec, trials_csv=fh)
        else:
            res = run_dissemination(config, c, spec)
        gb = offloading_gain(config, c)
        scored = res.tally("ue_t_inset").sum(axis=0)
        succ = res.tally("successes").sum(axis=0)
        header = ["quantity", "c", "model", "estimate", "se", "scored_requesters", "successes"]
        rows = [[f"P_{m + 1}", fmt(float(c[m])), fmt(float(gb.per_group_success[m])),
                 fmt(float(res.est_success[m])), fmt(float(res.success_se[m])),
                 str(int(scored[m])), str(int(succ[m]))] for m in range(M)]
        rows.append(["G", "", fmt(gb.total_gain), fmt(res.est_gain_density), fmt(res.gain_se),
                     str(int(scored.sum())), str(int(succ.sum()))])
        _write(args.output, header, rows)
        return 0

    if args.command == "sweep":
        sweep = SweepSpec(args.param, args.start, args.stop, args.steps, args.solver)
        header, rows = run_sweep(config, sweep, _ago_opts(args), GridSpec(args.step),
                                 jobs=args.jobs)
        _write(args.output, header, rows)
        return int(any(r[-1] for r in rows))

    raise AssertionError(args.command)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except InstanceError as exc:
        for msg in exc.errors:
            print(f"error: {msg}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
