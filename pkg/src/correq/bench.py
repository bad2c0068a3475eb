"""Seeded random games, the lambda sweep and the timing comparison.

Randomness: each game gets its own ``numpy.random.PCG64`` stream seeded with
``SeedSequence([base_seed, game_id])``; costs are ``Generator.random`` draws
(uniform on [0, 1)). Both are stable across platforms.
"""
from __future__ import annotations

import csv
import io
import math
import statistics
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .entropy import certify, solve_closed_form
from .game import NormalFormGame
from .lp import build_ce_polytope, feasible_point

CSV_SCHEMA_VERSION = 1
SWEEP_COLUMNS = [
    "game_id", "seed", "n_players", "actions", "lambda",
    "eps_empirical", "eps_bound", "t_closed_form_s", "t_lp_s",
]
TIMING_COLUMNS = {"t_closed_form_s", "t_lp_s"}
SUMMARY_COLUMNS = [
    "n_players", "actions", "lambda", "count", "eps_empirical_mean", "eps_empirical_std",
    "eps_bound_max_mean", "eps_bound_playermean_mean", "violations",
]
BENCH_COLUMNS = ["n_players", "actions", "reps", "t_closed_form_s", "t_lp_s", "ratio"]

PAPER_LAMBDAS = (0.1, 10.0, 30.0, 100.0, 1000.0, 1e4)
DEFAULT_SIZES = ((2, 2), (2, 5), (2, 10), (3, 2), (3, 5))
MAX_JOINT_ACTIONS = 10**6


def game_seed(base_seed: int, game_id: int) -> int:
    state = np.random.SeedSequence([int(base_seed), int(game_id)]).generate_state(1, np.uint64)
    return int(state[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def gen_random_game(n_players: int, action_counts: Sequence[int], rng: np.random.Generator) -> NormalFormGame:
    counts = tuple(int(a) for a in action_counts)
    if n_players < 2 or len(counts) != n_players:
        raise ValueError(f"need {n_players} >= 2 players with one action count each, got {counts}")
    if any(a < 2 for a in counts):
        raise ValueError(f"each player needs at least 2 actions, got {counts}")
    size = math.prod(counts)
    if size > MAX_JOINT_ACTIONS:
        raise ValueError(f"{size} joint actions exceeds the cap of {MAX_JOINT_ACTIONS}")
    return NormalFormGame(counts, rng.random((n_players, size)))


def _actions_label(counts) -> str:
    return "x".join(str(a) for a in counts)


@dataclass
class SweepConfig:
    games_per_size: int = 100
    sizes: Sequence[tuple[int, int]] = DEFAULT_SIZES
    lambdas: Sequence[float] = PAPER_LAMBDAS
    seed: int = 0
    with_lp: bool = False


@dataclass
class SweepRecord:
    game_id: int
    seed: int
    n_players: int
    actions: tuple[int, ...]
    lam: float
    eps_empirical: float
    eps_bound: float
    t_closed_form_s: float
    t_lp_s: float | None = None
    eps_bound_mean: float = field(default=0.0, repr=False)

    def row(self) -> list:
        return [
            self.game_id, self.seed, self.n_players, _actions_label(self.actions), repr(self.lam),
            repr(self.eps_empirical), repr(self.eps_bound), repr(self.t_closed_form_s),
            "" if self.t_lp_s is None else repr(self.t_lp_s),
        ]


def sweep_game(game: NormalFormGame, lambdas: Iterable[float], game_id: int = 0, seed: int = 0,
               t_lp: float | None = None) -> list[SweepRecord]:
    out = []
    for lam in lambdas:
        t0 = time.perf_counter()
        sol = solve_closed_form(game, lam)
        elapsed = time.perf_counter() - t0
        c = certify(game, sol.decomposition, sol.weights.values)
        out.append(SweepRecord(
            game_id, seed, game.num_players, game.action_counts, float(lam),
            c.empirical, c.bound, elapsed, t_lp, c.certificate.mean_bound,
        ))
    return out


def time_lp(game: NormalFormGame) -> float:
    t0 = time.perf_counter()
    outcome = feasible_point(build_ce_polytope(game))
    elapsed = time.perf_counter() - t0
    if not outcome.ok:
        raise RuntimeError(f"LP baseline returned status {outcome.status}")
    return elapsed


def run_sweep(config: SweepConfig) -> list[SweepRecord]:
    records = []
    game_id = 0
    for n_players, a in config.sizes:
        for _ in range(config.games_per_size):
            s = game_seed(config.seed, game_id)
            game = gen_random_game(n_players, [a] * n_players, make_rng(s))
            t_lp = time_lp(game) if config.with_lp else None
            records.extend(sweep_game(game, config.lambdas, game_id, s, t_lp))
            game_id += 1
    return records


def records_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def summarize(records: Sequence[SweepRecord]) -> list[dict]:
    groups: dict[tuple, list[SweepRecord]] = {}
    for r in records:
        groups.setdefault((r.n_players, r.actions, r.lam), []).append(r)
    out = []
    for (n, actions, lam), rs in groups.items():
        emp = [r.eps_empirical for r in rs]
        out.append({
            "n_players": n,
            "actions": _actions_label(actions),
            "lambda": lam,
            "count": len(rs),
            "eps_empirical_mean": statistics.fmean(emp),
            "eps_empirical_std": statistics.pstdev(emp),
            "eps_bound_max_mean": statistics.fmean(r.eps_bound for r in rs),
            "eps_bound_playermean_mean": statistics.fmean(r.eps_bound_mean for r in rs),
            "violations": sum(r.eps_empirical > r.eps_bound + 1e-8 for r in rs),
        })
    return out


def summary_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, SUMMARY_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def strip_timing(csv_text: str) -> str:
    """Drop timing columns so two sweep outputs can be compared byte for byte."""
    rows = list(csv.reader(io.StringIO(csv_text)))
    keep = [k for k, name in enumerate(rows[0]) if name not in TIMING_COLUMNS]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([row[k] for k in keep])
    return buf.getvalue()


@dataclass
class TimingRow:
    n_players: int
    actions: tuple[int, ...]
    reps: int
    t_closed_form_s: float
    t_lp_s: float | None

    @property
    def ratio(self) -> float | None:
        if self.t_lp_s is None:
            return None
        return self.t_lp_s / self.t_closed_form_s

    def row(self) -> list:
        return [
            self.n_players, _actions_label(self.actions), self.reps, repr(self.t_closed_form_s),
            "" if self.t_lp_s is None else repr(self.t_lp_s),
            "" if self.ratio is None else repr(self.ratio),
        ]


def bench_timing(sizes: Sequence[tuple[int, int]], reps: int = 5, seed: int = 0,
                 lam: float = 1.0, with_lp: bool = True) -> list[TimingRow]:
    """Median wall time of the closed form and the LP baseline on one game per size.

    Runs sequentially; the LP time covers building the polytope and phase 1.
    """
    rows = []
    for k, (n_players, a) in enumerate(sizes):
        game = gen_random_game(n_players, [a] * n_players, make_rng(game_seed(seed, k)))
        cf = []
        for _ in range(reps):
            t0 = time.perf_counter()
            solve_closed_form(game, lam)
            cf.append(time.perf_counter() - t0)
        t_lp = statistics.median(time_lp(game) for _ in range(reps)) if with_lp else None
        rows.append(TimingRow(n_players, game.action_counts, reps, statistics.median(cf), t_lp))
    return rows


def timing_csv(rows: Sequence[TimingRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    for r in rows:
        w.writerow(r.row())
    return buf.getvalue()
