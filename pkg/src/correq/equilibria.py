"""Checkers for Nash, correlated and generalized Nash equilibrium conditions."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .game import (
    Decomposition,
    NormalFormGame,
    _check_joint,
    _check_len,
    as_correlated,
    as_joint,
    conditional_costs,
    opponents,
)

CONDITION_TOL = 1e-8
STATIONARITY_TOL = 1e-10


class Deviation(NamedTuple):
    player: int
    from_action: int | None  # None: the player's current mixed strategy
    to_action: int
    value: float


@dataclass(frozen=True)
class DeviationReport:
    entries: tuple[Deviation, ...]
    tol: float = CONDITION_TOL

    @property
    def witness(self) -> Deviation | None:
        if not self.entries:
            return None
        return max(self.entries, key=lambda e: e.value)

    @property
    def max_violation(self) -> float:
        w = self.witness
        return 0.0 if w is None else w.value

    @property
    def holds(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self, verbose: bool = False) -> dict:
        w = self.witness
        out = {
            "max_violation": self.max_violation,
            "holds": self.holds,
            "tol": self.tol,
            "witness": None if w is None else {"player": w.player, "from": w.from_action, "to": w.to_action},
        }
        if verbose:
            out["entries"] = [
                {"player": e.player, "from": e.from_action, "to": e.to_action, "value": e.value}
                for e in self.entries
            ]
        return out


@dataclass(frozen=True)
class StationarityReport:
    multipliers: np.ndarray
    residuals: np.ndarray
    tol: float = STATIONARITY_TOL
    offending: tuple = field(default=())

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max())

    @property
    def holds(self) -> bool:
        return self.max_residual <= self.tol

    def to_dict(self) -> dict:
        return {
            "multipliers": self.multipliers.tolist(),
            "residuals": self.residuals.tolist(),
            "max_residual": self.max_residual,
            "holds": self.holds,
            "tol": self.tol,
        }


def check_nash(game: NormalFormGame, x, tol: float = CONDITION_TOL) -> DeviationReport:
    """Regret of each player's mixed strategy against every pure deviation."""
    x = as_joint(x)
    _check_joint(game, x)
    entries = []
    for i in range(game.num_players):
        costs = conditional_costs(game, i, opponents(x, i))
        current = float(x[i] @ costs)
        for b in range(game.action_counts[i]):
            entries.append(Deviation(i, None, b, current - float(costs[b])))
    return DeviationReport(tuple(entries), tol)


def swap_matrices(game: NormalFormGame, y: np.ndarray) -> list[np.ndarray]:
    """Per player, ``M[a, b] = sum_r y(a, r) * (l(a, r) - l(b, r))``.

    ``r`` ranges over opponent joint actions. Diagonals are zero.
    """
    out = []
    for i in range(game.num_players):
        n = game.action_counts[i]
        yt = np.moveaxis(y.reshape(game.action_counts), i, 0).reshape(n, -1)
        lt = np.moveaxis(game.cost_tensor(i), i, 0).reshape(n, -1)
        m = (yt * lt).sum(axis=1)[:, None] - yt @ lt.T
        np.fill_diagonal(m, 0.0)
        out.append(m)
    return out


def check_ce(game: NormalFormGame, y, tol: float = CONDITION_TOL) -> DeviationReport:
    """Every swap deviation ``(player, a -> b)`` of a correlated strategy."""
    y = as_correlated(y)
    _check_len(game, y)
    entries = []
    for i, m in enumerate(swap_matrices(game, y.y)):
        n = m.shape[0]
        for a in range(n):
            for b in range(n):
                if a != b:
                    entries.append(Deviation(i, a, b, float(m[a, b])))
    return DeviationReport(tuple(entries), tol)


def empirical_suboptimality(game: NormalFormGame, y) -> float:
    """Largest swap-deviation gain; 0 when no player has two actions."""
    y = as_correlated(y)
    _check_len(game, y)
    best = None
    for m in swap_matrices(game, y.y):
        n = m.shape[0]
        if n < 2:
            continue
        v = float(m[~np.eye(n, dtype=bool)].max())
        best = v if best is None else max(best, v)
    return 0.0 if best is None else best


def _require_fully_mixed(game: NormalFormGame, d: Decomposition):
    if d.size != game.num_joint_actions or d.num_players != game.num_players:
        raise ValueError(
            f"decomposition shape {(d.num_players, d.size)} does not match game "
            f"{(game.num_players, game.num_joint_actions)}"
        )
    bad = d.first_zero()
    if bad is not None:
        i, a = bad
        raise ValueError(f"decomposition is not fully mixed: measure {i} is zero at joint action {a}")


def _report(values: np.ndarray, tol: float) -> StationarityReport:
    sigma = -values.mean(axis=1)
    residuals = np.abs(values + sigma[:, None]).max(axis=1)
    return StationarityReport(sigma, residuals, tol)


def check_fully_mixed_gne(game: NormalFormGame, d: Decomposition, tol: float = CONDITION_TOL) -> StationarityReport:
    """Stationarity of a fully mixed decomposition in the unregularized game.

    With every measure strictly positive the multiplier conditions force each
    player's cost to be constant over the joint actions. Multipliers are
    reported with the sign convention ``cost(a) = multiplier``.
    """
    _require_fully_mixed(game, d)
    rep = _report(game.costs, tol)
    return StationarityReport(-rep.multipliers, rep.residuals, tol)


def _weights(lam, n: int) -> np.ndarray:
    lam = np.broadcast_to(np.asarray(lam, dtype=np.float64), (n,))
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise ValueError(f"regularization weights must be positive and finite, got {lam.tolist()}")
    return lam


def regularized_costs(game: NormalFormGame, d: Decomposition, lam) -> np.ndarray:
    lam = _weights(lam, game.num_players)
    return game.costs + d.log_measures / lam[:, None]


def check_regularized_stationarity(
    game: NormalFormGame, d: Decomposition, lam: Sequence[float], tol: float = STATIONARITY_TOL
) -> StationarityReport:
    """Entropy-regularized costs must be constant in the joint action.

    The multiplier is the negated mean regularized cost; the residual is the
    largest deviation from it.
    """
    _require_fully_mixed(game, d)
    return _report(regularized_costs(game, d, lam), tol)
