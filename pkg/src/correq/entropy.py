"""Closed-form entropy-regularized generalized Nash equilibrium.

For weights ``lam`` the solution is

    log alpha_i(a) = -lam_i * l_i(a) - (lam_i / sum(lam)) * log Z,
    log Z          = logsumexp_a(-sum_j lam_j * l_j(a)),

and the product of the measures is the softmax of the weighted total cost.
Everything is evaluated in the log domain with a single max shift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibria import CONDITION_TOL, _require_fully_mixed, _weights, empirical_suboptimality
from .game import CorrelatedStrategy, Decomposition, NormalFormGame, product


@dataclass(frozen=True)
class RegularizationWeights:
    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
        if v.ndim != 1 or not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError(f"regularization weights must be positive and finite, got {v.tolist()}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def for_game(cls, game: NormalFormGame, lam) -> "RegularizationWeights":
        if isinstance(lam, RegularizationWeights):
            lam = lam.values
        lam = np.atleast_1d(np.asarray(lam, dtype=np.float64))
        if lam.size == 1:
            lam = np.full(game.num_players, lam[0])
        if lam.size != game.num_players:
            raise ValueError(f"expected 1 or {game.num_players} weights, got {lam.size}")
        return cls(lam)

    @property
    def total(self) -> float:
        return float(self.values.sum())


def _logsumexp(s: np.ndarray) -> float:
    m = s.max()
    return float(m + np.log(np.exp(s - m).sum()))


@dataclass(frozen=True)
class EntropySolution:
    decomposition: Decomposition
    log_y: np.ndarray
    weights: RegularizationWeights
    log_partition: float

    @property
    def y(self) -> np.ndarray:
        return np.exp(self.log_y)

    @property
    def strategy(self) -> CorrelatedStrategy:
        return CorrelatedStrategy(self.y)


def solve_closed_form(game: NormalFormGame, lam) -> EntropySolution:
    w = RegularizationWeights.for_game(game, lam)
    lam = w.values
    scores = -(lam @ game.costs)
    log_z = _logsumexp(scores)
    log_alpha = -lam[:, None] * game.costs - (lam / w.total)[:, None] * log_z
    log_y = scores - log_z
    return EntropySolution(Decomposition(log_alpha), log_y, w, log_z)


@dataclass(frozen=True)
class EpsilonCertificate:
    eps: np.ndarray  # per player log-measure spread
    bounds: np.ndarray  # eps / lam

    @property
    def epsilon(self) -> float:
        return float(self.eps.max())

    @property
    def bound(self) -> float:
        return float(self.bounds.max())

    @property
    def mean_bound(self) -> float:
        return float(self.bounds.mean())

    def to_dict(self) -> dict:
        return {
            "eps": self.eps.tolist(),
            "bounds": self.bounds.tolist(),
            "epsilon": self.epsilon,
            "bound": self.bound,
        }


def epsilon_certificate(d: Decomposition, lam) -> EpsilonCertificate:
    lam = _weights(lam, d.num_players)
    bad = d.first_zero()
    if bad is not None:
        raise ValueError(f"measure {bad[0]} is zero at joint action {bad[1]}; certificate needs full support")
    logs = d.log_measures
    eps = logs.max(axis=1) - logs.min(axis=1)
    return EpsilonCertificate(eps, eps / lam)


@dataclass(frozen=True)
class Certification:
    empirical: float
    bound: float
    holds: bool
    certificate: EpsilonCertificate


def certify(game: NormalFormGame, d: Decomposition, lam, tol: float = CONDITION_TOL) -> Certification:
    """Compare the measured swap-deviation gain with the log-spread bound."""
    _require_fully_mixed(game, d)
    cert = epsilon_certificate(d, lam)
    empirical = empirical_suboptimality(game, product(d))
    return Certification(empirical, cert.bound, empirical <= cert.bound + tol, cert)


def solution_to_dict(game: NormalFormGame, sol: EntropySolution, tol: float = CONDITION_TOL) -> dict:
    c = certify(game, sol.decomposition, sol.weights.values, tol)
    return {
        "actions": list(game.action_counts),
        "lambda": sol.weights.values.tolist(),
        "y": sol.y.tolist(),
        "log_y": sol.log_y.tolist(),
        "log_alpha": sol.decomposition.log_measures.tolist(),
        "log_partition": sol.log_partition,
        "certificate": c.certificate.to_dict(),
        "eps_empirical": c.empirical,
        "eps_bound": c.bound,
        "holds": c.holds,
    }
