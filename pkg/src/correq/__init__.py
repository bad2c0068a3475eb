"""Correlated equilibria of normal-form games: checkers, an LP over the
equilibrium polytope, and the closed-form entropy-regularized solution."""

from .entropy import (
    EntropySolution,
    EpsilonCertificate,
    RegularizationWeights,
    certify,
    epsilon_certificate,
    solve_closed_form,
)
from .equilibria import (
    DeviationReport,
    StationarityReport,
    check_ce,
    check_fully_mixed_gne,
    check_nash,
    check_regularized_stationarity,
    empirical_suboptimality,
)
from .game import (
    CorrelatedStrategy,
    Decomposition,
    JointStrategy,
    NormalFormGame,
    conditional_cost,
    expected_cost,
    induce_correlated,
    joint_index,
    joint_tuple,
    load_game,
    parse_game,
    product,
    rescale_pair,
)
from .lp import LinearProgram, SolveOutcome, build_ce_polytope, feasible_point, minimize_linear

__version__ = "0.1.0"
