"""Finite normal-form games, strategies and normalized decompositions.

Joint actions are addressed in mixed radix with the last player varying
fastest (C order), so a cost array of length ``A = prod(action_counts)``
reshapes to an ``A_1 x ... x A_N`` tensor with ``numpy.reshape``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MASS_TOL = 1e-9


class GameFormatError(ValueError):
    """Raised for malformed game files or inconsistent game data."""


def _frozen(arr) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class NormalFormGame:
    """An N-player cost-minimization game.

    ``costs[i]`` is the flat vector of player ``i``'s costs over all joint
    actions.
    """

    action_counts: tuple[int, ...]
    costs: np.ndarray  # shape (N, A)

    def __post_init__(self):
        counts = tuple(int(a) for a in self.action_counts)
        if len(counts) < 2:
            raise GameFormatError("a game needs at least 2 players")
        if any(a < 1 for a in counts):
            raise GameFormatError(f"action counts must be >= 1, got {counts}")
        costs = _frozen(self.costs)
        size = math.prod(counts)
        if costs.shape != (len(counts), size):
            raise GameFormatError(
                f"costs must have shape ({len(counts)}, {size}), got {costs.shape}"
            )
        if not np.all(np.isfinite(costs)):
            raise GameFormatError("costs must be finite")
        object.__setattr__(self, "action_counts", counts)
        object.__setattr__(self, "costs", costs)

    @property
    def num_players(self) -> int:
        return len(self.action_counts)

    @property
    def num_joint_actions(self) -> int:
        return self.costs.shape[1]

    @property
    def shape(self) -> tuple[int, ...]:
        return self.action_counts

    def cost_tensor(self, i: int) -> np.ndarray:
        return self.costs[i].reshape(self.action_counts)

    @classmethod
    def from_tensors(cls, tensors: Sequence) -> "NormalFormGame":
        """Build a game from one ``A_1 x ... x A_N`` cost tensor per player."""
        arrays = [np.asarray(t, dtype=np.float64) for t in tensors]
        shape = arrays[0].shape
        if len(arrays) != len(shape):
            raise GameFormatError(
                f"{len(arrays)} cost tensors for a {len(shape)}-player action shape"
            )
        if any(a.shape != shape for a in arrays):
            raise GameFormatError("all cost tensors must share one shape")
        return cls(shape, np.stack([a.ravel() for a in arrays]))

    def to_dict(self) -> dict:
        return {
            "num_players": self.num_players,
            "actions": list(self.action_counts),
            "costs": self.costs.tolist(),
        }


def joint_index(game: NormalFormGame, actions: Sequence[int]) -> int:
    """Flat index of a joint action tuple (last player fastest)."""
    if len(actions) != game.num_players:
        raise IndexError(
            f"expected {game.num_players} action indices, got {len(actions)}"
        )
    flat = 0
    for k, (a, n) in enumerate(zip(actions, game.action_counts)):
        if not 0 <= a < n:
            raise IndexError(f"action {a} out of range for player {k} with {n} actions")
        flat = flat * n + int(a)
    return flat


def joint_tuple(game: NormalFormGame, flat: int) -> tuple[int, ...]:
    if not 0 <= flat < game.num_joint_actions:
        raise IndexError(f"flat index {flat} out of range [0, {game.num_joint_actions})")
    out = []
    for n in reversed(game.action_counts):
        flat, a = divmod(int(flat), n)
        out.append(a)
    return tuple(reversed(out))


# -- strategies -------------------------------------------------------------


@dataclass(frozen=True)
class JointStrategy:
    """Independent mixed strategies, one simplex vector per player."""

    marginals: tuple[np.ndarray, ...]

    def __post_init__(self):
        margs = tuple(_frozen(x) for x in self.marginals)
        for i, x in enumerate(margs):
            if x.ndim != 1 or x.size == 0:
                raise ValueError(f"strategy of player {i} must be a non-empty vector")
            if not np.all(np.isfinite(x)) or np.any(x < 0):
                raise ValueError(f"strategy of player {i} has negative or non-finite entries")
            if abs(x.sum() - 1.0) > MASS_TOL:
                raise ValueError(f"strategy of player {i} sums to {x.sum()!r}, not 1")
        object.__setattr__(self, "marginals", margs)

    def __len__(self):
        return len(self.marginals)

    def __getitem__(self, i):
        return self.marginals[i]

    @property
    def action_counts(self) -> tuple[int, ...]:
        return tuple(x.size for x in self.marginals)

    @classmethod
    def uniform(cls, action_counts: Iterable[int]) -> "JointStrategy":
        return cls(tuple(np.full(n, 1.0 / n) for n in action_counts))

    @classmethod
    def pure(cls, action_counts: Sequence[int], actions: Sequence[int]) -> "JointStrategy":
        return cls(tuple(np.eye(n)[a] for n, a in zip(action_counts, actions)))


@dataclass(frozen=True)
class CorrelatedStrategy:
    """A probability vector over flat joint actions."""

    y: np.ndarray

    def __post_init__(self):
        y = _frozen(self.y)
        if y.ndim != 1 or y.size == 0:
            raise ValueError("correlated strategy must be a non-empty vector")
        if not np.all(np.isfinite(y)) or np.any(y < 0):
            raise ValueError("correlated strategy has negative or non-finite entries")
        if abs(y.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"correlated strategy sums to {y.sum()!r}, not 1")
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.y.size

    @classmethod
    def uniform(cls, size: int) -> "CorrelatedStrategy":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, flat: int) -> "CorrelatedStrategy":
        return cls(np.eye(size)[flat])


def normalize(v) -> CorrelatedStrategy:
    """Explicit renormalization of a nonnegative vector."""
    v = np.asarray(v, dtype=np.float64)
    total = v.sum()
    if not total > 0 or not np.isfinite(total):
        raise ValueError("cannot normalize a vector with non-positive or non-finite mass")
    return CorrelatedStrategy(v / total)


def as_correlated(y) -> CorrelatedStrategy:
    return y if isinstance(y, CorrelatedStrategy) else CorrelatedStrategy(y)


def as_joint(x) -> JointStrategy:
    return x if isinstance(x, JointStrategy) else JointStrategy(tuple(x))


def _check_len(game: NormalFormGame, y: CorrelatedStrategy):
    if y.y.size != game.num_joint_actions:
        raise ValueError(
            f"strategy has {y.y.size} entries, game has {game.num_joint_actions} joint actions"
        )


def _check_joint(game: NormalFormGame, x: JointStrategy):
    if x.action_counts != game.action_counts:
        raise ValueError(
            f"joint strategy shape {x.action_counts} does not match game {game.action_counts}"
        )


def expected_cost(game: NormalFormGame, y, i: int) -> float:
    y = as_correlated(y)
    _check_len(game, y)
    return float(y.y @ game.costs[i])


def _opponent_weights(game: NormalFormGame, i: int, x_minus: Sequence[np.ndarray]) -> np.ndarray:
    """Product distribution of the opponents as a tensor with a unit axis at ``i``."""
    x_minus = [np.asarray(x, dtype=np.float64) for x in x_minus]
    others = [k for k in range(game.num_players) if k != i]
    if len(x_minus) != len(others):
        raise ValueError(f"expected {len(others)} opponent strategies, got {len(x_minus)}")
    w = np.ones([1] * game.num_players)
    for k, x in zip(others, x_minus):
        if x.shape != (game.action_counts[k],):
            raise ValueError(
                f"opponent strategy for player {k} has shape {x.shape}, "
                f"expected ({game.action_counts[k]},)"
            )
        shape = [1] * game.num_players
        shape[k] = x.size
        w = w * x.reshape(shape)
    return w


def conditional_costs(game: NormalFormGame, i: int, x_minus: Sequence[np.ndarray]) -> np.ndarray:
    """Expected cost of every action of player ``i`` against opponents ``x_minus``."""
    w = _opponent_weights(game, i, x_minus)
    weighted = game.cost_tensor(i) * w
    axes = tuple(k for k in range(game.num_players) if k != i)
    return weighted.sum(axis=axes)


def conditional_cost(game: NormalFormGame, i: int, a_i: int, x_minus: Sequence[np.ndarray]) -> float:
    if not 0 <= a_i < game.action_counts[i]:
        raise IndexError(f"action {a_i} out of range for player {i}")
    return float(conditional_costs(game, i, x_minus)[a_i])


def opponents(x: JointStrategy, i: int) -> list[np.ndarray]:
    return [m for k, m in enumerate(x.marginals) if k != i]


def induce_correlated(game: NormalFormGame, x) -> CorrelatedStrategy:
    """Outer product of the marginals, flattened in joint-index order."""
    x = as_joint(x)
    _check_joint(game, x)
    y = x.marginals[0]
    for m in x.marginals[1:]:
        y = np.multiply.outer(y, m)
    return CorrelatedStrategy(np.ravel(y))


# -- decompositions ---------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    """N unnormalized measures over the joint actions, stored as logs.

    Zero mass is ``-inf`` in ``log_measures``. Keeping logs lets strongly
    regularized solutions stay strictly positive even where ``exp``
    underflows.
    """

    log_measures: np.ndarray  # shape (N, A)

    def __post_init__(self):
        logs = _frozen(self.log_measures)
        if logs.ndim != 2 or logs.shape[0] < 1:
            raise ValueError("log_measures must be a 2-d array with one row per player")
        if np.any(np.isnan(logs)) or np.any(logs == np.inf):
            raise ValueError("log measures must not be NaN or +inf")
        object.__setattr__(self, "log_measures", logs)

    @classmethod
    def from_measures(cls, measures) -> "Decomposition":
        m = np.asarray(measures, dtype=np.float64)
        if m.ndim != 2:
            raise ValueError("measures must be a 2-d array with one row per player")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise ValueError("measures must be finite and nonnegative")
        with np.errstate(divide="ignore"):
            return cls(np.log(m))

    @classmethod
    def trivial(cls, y, num_players: int) -> "Decomposition":
        """``alpha_1 = y`` and all-ones for every other player."""
        y = as_correlated(y).y
        m = np.ones((num_players, y.size))
        m[0] = y
        return cls.from_measures(m)

    @property
    def measures(self) -> np.ndarray:
        return np.exp(self.log_measures)

    @property
    def num_players(self) -> int:
        return self.log_measures.shape[0]

    @property
    def size(self) -> int:
        return self.log_measures.shape[1]

    def is_fully_mixed(self) -> bool:
        return bool(np.all(np.isfinite(self.log_measures)))

    def first_zero(self) -> tuple[int, int] | None:
        bad = np.argwhere(~np.isfinite(self.log_measures))
        return None if bad.size == 0 else (int(bad[0, 0]), int(bad[0, 1]))

    def log_product(self) -> np.ndarray:
        return self.log_measures.sum(axis=0)

    def mass(self) -> float:
        return float(np.exp(self.log_product()).sum())

    def is_normalized(self, tol: float = MASS_TOL) -> bool:
        return abs(self.mass() - 1.0) <= tol


def product(d: Decomposition, as_strategy: bool = True):
    """Element-wise product of the measures.

    Returns a :class:`CorrelatedStrategy` unless ``as_strategy`` is false, in
    which case the raw vector is returned whatever its mass.
    """
    y = np.exp(d.log_product())
    if not as_strategy:
        return y
    if abs(y.sum() - 1.0) > MASS_TOL:
        raise ValueError(f"decomposition has mass {y.sum()!r}, not a correlated strategy")
    return CorrelatedStrategy(y)


def rescale_pair(d: Decomposition, i: int, j: int, factor: float) -> Decomposition:
    """Scale measure ``i`` by ``factor`` and measure ``j`` by its inverse."""
    if i == j:
        raise ValueError("rescale_pair needs two distinct players")
    if not (np.isfinite(factor) and factor > 0):
        raise ValueError(f"factor must be positive and finite, got {factor!r}")
    logs = np.array(d.log_measures)
    shift = math.log(factor)
    logs[i] += shift
    logs[j] -= shift
    return Decomposition(logs)


# -- file format ------------------------------------------------------------


def _reject_constant(name):
    raise GameFormatError(f"non-finite number {name} is not allowed")


def game_from_dict(data) -> NormalFormGame:
    if not isinstance(data, dict):
        raise GameFormatError("game file must hold a JSON object")
    for key in ("num_players", "actions", "costs"):
        if key not in data:
            raise GameFormatError(f"missing field '{key}'")
    n = data["num_players"]
    actions = data["actions"]
    costs = data["costs"]
    if not isinstance(n, int) or n < 2:
        raise GameFormatError(f"field 'num_players': expected integer >= 2, got {n!r}")
    if not isinstance(actions, list) or len(actions) != n:
        raise GameFormatError(f"field 'actions': expected a list of {n} integers")
    if not all(isinstance(a, int) and a >= 1 for a in actions):
        raise GameFormatError(f"field 'actions': entries must be integers >= 1, got {actions!r}")
    size = math.prod(actions)
    if not isinstance(costs, list) or len(costs) != n:
        raise GameFormatError(f"field 'costs': expected {n} cost arrays")
    for i, row in enumerate(costs):
        if not isinstance(row, list) or len(row) != size:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise GameFormatError(f"field 'costs[{i}]': expected {size} numbers, got {got}")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise GameFormatError(f"field 'costs[{i}][{j}]': not a number: {v!r}")
    return NormalFormGame(tuple(actions), np.array(costs, dtype=np.float64))


def parse_game(text: str) -> NormalFormGame:
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return game_from_dict(data)


def load_game(path) -> NormalFormGame:
    with open(path) as f:
        return parse_game(f.read())


def dump_game(game: NormalFormGame) -> str:
    return json.dumps(game.to_dict())


def g_star() -> NormalFormGame:
    """The 2x2 bimatrix fixture used throughout the tests.

    Row player costs ``[[3, 3], [2, 4]]``, column player ``[[1, 2], [1, 0]]``.
    """
    return NormalFormGame.from_tensors([[[3, 3], [2, 4]], [[1, 2], [1, 0]]])
