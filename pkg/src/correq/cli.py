"""Command-line entry point.

Exit codes: 0 success, 1 a checked condition failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import bench
from .entropy import solution_to_dict, solve_closed_form
from .equilibria import CONDITION_TOL, check_ce, check_nash
from .game import (
    CorrelatedStrategy,
    GameFormatError,
    JointStrategy,
    NormalFormGame,
    dump_game,
    joint_index,
    joint_tuple,
    load_game,
)
from .lp import build_ce_polytope, dump_lp, feasible_point, minimize_linear, total_cost_objective

log = logging.getLogger("correq")


class InputError(Exception):
    pass


def _sizes(text: str) -> list[tuple[int, int]]:
    """``"2:2,2:5,3:3"`` -> ``[(2, 2), (2, 5), (3, 3)]`` as (players, actions each)."""
    try:
        out = []
        for part in text.split(","):
            n, a = part.split(":")
            out.append((int(n), int(a)))
        return out
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must look like '2:2,3:5', got {text!r}")


def _read_json(path: str):
    try:
        with open(path) as f:
            return json.load(f)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _game(path: str) -> NormalFormGame:
    try:
        return load_game(path)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc
    except GameFormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _pure(text: str, game: NormalFormGame) -> list[int]:
    try:
        actions = [int(v) for v in text.split(":", 1)[1].split(",")]
        joint_index(game, actions)
    except (ValueError, IndexError) as exc:
        raise InputError(f"bad pure profile {text!r}: {exc}") from exc
    return actions


def _correlated(text: str, game: NormalFormGame) -> CorrelatedStrategy:
    if text == "uniform":
        return CorrelatedStrategy.uniform(game.num_joint_actions)
    if text.startswith("pure:"):
        return CorrelatedStrategy.point_mass(game.num_joint_actions, joint_index(game, _pure(text, game)))
    data = _read_json(text)
    y = data.get("y") if isinstance(data, dict) else data
    if y is None:
        raise InputError(f"{text}: expected a list or an object with field 'y'")
    try:
        return CorrelatedStrategy(np.asarray(y, dtype=np.float64))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{text}: field 'y': {exc}") from exc


def _joint(text: str, game: NormalFormGame) -> JointStrategy:
    if text == "uniform":
        return JointStrategy.uniform(game.action_counts)
    if text.startswith("pure:"):
        return JointStrategy.pure(game.action_counts, _pure(text, game))
    data = _read_json(text)
    x = data.get("x") if isinstance(data, dict) else data
    if x is None:
        raise InputError(f"{text}: expected a list of strategies or an object with field 'x'")
    try:
        return JointStrategy(tuple(np.asarray(v, dtype=np.float64) for v in x))
    except (ValueError, TypeError) as exc:
        raise InputError(f"{text}: field 'x': {exc}") from exc


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _report_text(report, args) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["player", "from", "to", "value"])
        for e in report.entries:
            w.writerow([e.player, "" if e.from_action is None else e.from_action, e.to_action, repr(e.value)])
        return buf.getvalue()
    return json.dumps(report.to_dict(verbose=args.verbose), indent=2) + "\n"


def _y_csv(game: NormalFormGame, y) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["flat", "actions", "y"])
    for k, v in enumerate(y):
        w.writerow([k, "x".join(map(str, joint_tuple(game, k))), repr(float(v))])
    return buf.getvalue()


def cmd_gen(args) -> int:
    if len(args.actions) == 1:
        args.actions = args.actions * args.players
    if len(args.actions) != args.players:
        raise InputError(f"--actions needs 1 or {args.players} values")
    try:
        game = bench.gen_random_game(args.players, args.actions, bench.make_rng(args.seed))
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit(args, dump_game(game) + "\n")
    return 0


def cmd_check_ce(args) -> int:
    game = _game(args.game)
    report = check_ce(game, _correlated(args.strategy, game), args.tol)
    _emit(args, _report_text(report, args))
    return 0 if report.holds else 1


def cmd_check_ne(args) -> int:
    game = _game(args.game)
    x = _joint(args.strategy, game)
    if x.action_counts != game.action_counts:
        raise InputError(f"strategy shape {x.action_counts} does not match game {game.action_counts}")
    report = check_nash(game, x, args.tol)
    _emit(args, _report_text(report, args))
    return 0 if report.holds else 1


def cmd_solve_entropy(args) -> int:
    game = _game(args.game)
    try:
        sol = solve_closed_form(game, args.lam)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.format == "csv":
        _emit(args, _y_csv(game, sol.y))
    else:
        _emit(args, json.dumps(solution_to_dict(game, sol, args.tol), indent=2) + "\n")
    return 0


def cmd_solve_lp(args) -> int:
    game = _game(args.game)
    lp = build_ce_polytope(game)
    if args.objective == "total":
        lp = lp.with_objective(total_cost_objective(game))
    if args.lp_dump:
        with open(args.lp_dump, "w") as f:
            f.write(dump_lp(lp))
    outcome = minimize_linear(lp) if lp.c is not None else feasible_point(lp)
    log.info("simplex: %s after %d pivots", outcome.status, outcome.pivots)
    if outcome.y is not None and args.format == "csv":
        _emit(args, _y_csv(game, outcome.y))
    else:
        _emit(args, json.dumps(outcome.to_dict(), indent=2) + "\n")
    return 0 if outcome.ok else 1


def cmd_sweep(args) -> int:
    config = bench.SweepConfig(args.games, args.sizes, args.lambdas, args.seed, args.with_lp)
    records = bench.run_sweep(config)
    if args.format == "json":
        text = json.dumps([dict(zip(bench.SWEEP_COLUMNS, r.row())) for r in records], indent=2) + "\n"
    else:
        text = bench.records_csv(records)
    _emit(args, text)
    summary = bench.summarize(records)
    if args.summary:
        with open(args.summary, "w") as f:
            f.write(bench.summary_csv(summary))
    violations = sum(row["violations"] for row in summary)
    log.info("%d records, %d bound violations", len(records), violations)
    return 0 if violations == 0 else 1


def cmd_bench(args) -> int:
    rows = bench.bench_timing(args.sizes, args.reps, args.seed, with_lp=not args.no_lp)
    if args.format == "json":
        text = json.dumps([dict(zip(bench.BENCH_COLUMNS, r.row())) for r in rows], indent=2) + "\n"
    else:
        text = bench.timing_csv(rows)
    _emit(args, text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=CONDITION_TOL, help="condition tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default=None)
    common.add_argument("--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="correq", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common], help="write a random game")
    s.add_argument("--players", type=int, default=2)
    s.add_argument("--actions", type=int, nargs="+", default=[2])
    s.set_defaults(func=cmd_gen, fmt="json")

    for name, func, help_ in (
        ("check-ce", cmd_check_ce, "check correlated-equilibrium conditions"),
        ("check-ne", cmd_check_ne, "check Nash conditions"),
    ):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("game")
        s.add_argument("--strategy", default="uniform",
                       help="'uniform', 'pure:a1,a2,...' or a JSON file")
        s.set_defaults(func=func, fmt="json")

    s = sub.add_parser("solve-entropy", parents=[common], help="closed-form regularized equilibrium")
    s.add_argument("game")
    s.add_argument("--lambda", dest="lam", type=float, nargs="+", default=[1.0])
    s.set_defaults(func=cmd_solve_entropy, fmt="json")

    s = sub.add_parser("solve-lp", parents=[common], help="simplex over the CE polytope")
    s.add_argument("game")
    s.add_argument("--objective", choices=["none", "total"], default="none")
    s.add_argument("--lp-dump", help="write the LP in plain-text standard form")
    s.set_defaults(func=cmd_solve_lp, fmt="json")

    s = sub.add_parser("sweep", parents=[common], help="lambda sweep over random games")
    s.add_argument("--games", type=int, default=100, help="games per size")
    s.add_argument("--sizes", type=_sizes, default=list(bench.DEFAULT_SIZES))
    s.add_argument("--lambdas", type=float, nargs="+", default=list(bench.PAPER_LAMBDAS))
    s.add_argument("--with-lp", action="store_true", help="also time the LP per game")
    s.add_argument("--summary", help="write per-lambda aggregates to this CSV")
    s.set_defaults(func=cmd_sweep, fmt="csv")

    s = sub.add_parser("bench", parents=[common], help="closed form vs LP timing")
    s.add_argument("--sizes", type=_sizes, default=[(2, 2), (2, 5), (2, 10), (3, 3)])
    s.add_argument("--reps", type=int, default=5)
    s.add_argument("--no-lp", action="store_true")
    s.set_defaults(func=cmd_bench, fmt="csv")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = args.fmt
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
