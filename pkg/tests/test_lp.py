import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import constant_game, random_game
from correq.equilibria import check_ce
from correq.game import NormalFormGame
from correq.lp import (
    OPT_TOL,
    PIVOT_TOL,
    RULES,
    LinearProgram,
    _Tableau,
    build_ce_polytope,
    dump_lp,
    feasible_point,
    minimize_linear,
    parse_lp,
    total_cost_objective,
)
from oracles import enumerate_vertices


def test_gstar_rows(gstar):
    lp = build_ce_polytope(gstar)
    assert lp.n == 4 and lp.m == 4
    expected = np.array([
        [1, -1, 0, 0],   # player 0: row 0 -> row 1
        [0, 0, -1, 1],   # player 0: row 1 -> row 0
        [-1, 0, 1, 0],   # player 1: col 0 -> col 1
        [0, 1, 0, -1],   # player 1: col 1 -> col 0
    ], float)
    assert np.array_equal(lp.G, expected)
    assert np.array_equal(lp.h, np.zeros(4))
    assert [tuple(r) for r in lp.rows] == [(0, 0, 1), (0, 1, 0), (1, 0, 1), (1, 1, 0)]


def test_row_counts():
    assert build_ce_polytope(NormalFormGame((1, 1), np.zeros((2, 1)))).m == 0
    lp = build_ce_polytope(random_game(np.random.default_rng(0), (3, 3, 3)))
    assert (lp.n, lp.m) == (27, 18)
    with pytest.raises(OverflowError):
        build_ce_polytope(random_game(np.random.default_rng(0), (3, 3)), max_rows=5)


def test_rows_match_swap_values():
    rng = np.random.default_rng(1)
    g = random_game(rng, (2, 3, 2))
    lp = build_ce_polytope(g)
    y = rng.dirichlet(np.ones(12))
    vals = [e.value for e in check_ce(g, y).entries]
    assert np.allclose(lp.G @ y, vals, atol=1e-15)


def test_feasible_point_gstar(gstar):
    out = feasible_point(build_ce_polytope(gstar))
    assert out.status == "feasible"
    assert check_ce(gstar, out.y).max_violation <= 1e-8
    assert out.residual <= 1e-8


def test_simplex_only_lp():
    lp = LinearProgram(np.zeros((0, 5)), np.zeros(0))
    out = feasible_point(lp)
    assert out.status == "feasible"
    assert sorted(out.y.tolist()) == [0, 0, 0, 0, 1]


def test_never_infeasible_on_random_games():
    rng = np.random.default_rng(2)
    for k in range(100):
        counts = (rng.integers(2, 6), rng.integers(2, 6)) if k % 2 else (3, 3, 3)
        g = random_game(rng, counts)
        out = feasible_point(build_ce_polytope(g))
        assert out.status == "feasible"
        assert check_ce(g, out.y).max_violation <= 1e-7
        assert out.residual <= 1e-8


def test_minimize_total_cost_gstar(gstar):
    lp = build_ce_polytope(gstar)
    c = total_cost_objective(gstar)
    out = minimize_linear(lp, c)
    best, verts = enumerate_vertices(lp.G, lp.h, c)
    assert out.status == "optimal"
    assert out.objective <= 4 + 1e-8
    assert abs(out.objective - best) <= 1e-8
    # uniform is the only correlated equilibrium of this game
    assert all(np.allclose(v, 0.25) for v in verts)
    assert out.min_reduced_cost >= -1e-9


def test_minimize_zero_objective(gstar):
    out = minimize_linear(build_ce_polytope(gstar), np.zeros(4))
    assert out.status == "optimal" and out.objective == 0.0


def test_minimize_avoids_costly_action():
    lp = LinearProgram(np.zeros((0, 4)), np.zeros(0))
    out = minimize_linear(lp, [0.0, 0.0, 1.0, 0.0])
    assert out.objective == 0.0 and out.y[2] == 0.0


def test_minimize_requires_objective(gstar):
    with pytest.raises(ValueError):
        minimize_linear(build_ce_polytope(gstar))
    with pytest.raises(ValueError):
        minimize_linear(build_ce_polytope(gstar), np.zeros(3))


@pytest.mark.parametrize("counts", [(2, 2), (2, 3)])
def test_minimize_matches_vertex_enumeration(counts):
    rng = np.random.default_rng(sum(counts))
    for _ in range(15):
        g = random_game(rng, counts)
        lp = build_ce_polytope(g)
        c = rng.normal(size=lp.n)
        out = minimize_linear(lp, c)
        best, _ = enumerate_vertices(lp.G, lp.h, c)
        assert out.status == "optimal"
        assert abs(out.objective - best) <= 1e-8


def test_minimize_matches_scipy():
    rng = np.random.default_rng(44)
    for counts in [(4, 4), (5, 3), (3, 3, 3), (2, 3, 4)]:
        g = random_game(rng, counts)
        lp = build_ce_polytope(g)
        c = g.costs.sum(axis=0)
        ref = linprog(c, A_ub=lp.G, b_ub=lp.h, A_eq=np.ones((1, lp.n)), b_eq=[1.0], bounds=(0, None),
                      method="highs")
        out = minimize_linear(lp, c)
        assert out.status == "optimal"
        assert out.objective == pytest.approx(ref.fun, abs=1e-8)
        assert check_ce(g, out.y).max_violation <= 1e-7


def test_optimum_beats_sampled_feasible_points():
    # near-coordination games have a full-dimensional CE polytope, so rejection sampling works
    rng = np.random.default_rng(8)
    accepted = 0
    while accepted < 1000:
        base = np.array([[0, 1, 1, 1, 0, 1, 1, 1, 0]], float)
        g = NormalFormGame((3, 3), np.vstack([base, base]) + 0.05 * rng.random((2, 9)))
        lp = build_ce_polytope(g)
        c = rng.normal(size=9)
        opt = minimize_linear(lp, c).objective
        ys = rng.dirichlet(np.ones(9), size=4000)
        ok = ys[np.all(ys @ lp.G.T <= 0, axis=1)]
        assert np.all(ok @ c >= opt - 1e-12)
        accepted += len(ok)


def test_determinism():
    rng = np.random.default_rng(9)
    g = random_game(rng, (3, 3, 3))
    lp = build_ce_polytope(g)
    a, b = feasible_point(lp), feasible_point(parse_lp(dump_lp(lp)))
    assert a.pivot_log == b.pivot_log
    assert np.array_equal(a.y, b.y)


def test_scaling_one_player():
    rng = np.random.default_rng(10)
    g = random_game(rng, (3, 4))
    costs = np.array(g.costs)
    costs[0] *= 37.0
    scaled = NormalFormGame(g.action_counts, costs)
    lp, lps = build_ce_polytope(g), build_ce_polytope(scaled)
    rows0 = [k for k, r in enumerate(lp.rows) if r.player == 0]
    assert np.allclose(lps.G[rows0], 37.0 * lp.G[rows0])
    out = feasible_point(lps)
    assert out.status == "feasible"
    assert check_ce(scaled, out.y).max_violation <= 1e-7


def test_constant_game_polytope_is_simplex():
    g = constant_game((3, 3), [1.0, 2.0])
    lp = build_ce_polytope(g)
    assert not lp.G.any()
    assert minimize_linear(lp, np.arange(9.0)).objective == 0.0


def test_infeasible_lp_reports_farkas_certificate():
    lp = LinearProgram(np.array([[1.0, 1.0, 1.0]]), np.array([-0.5]))
    out = feasible_point(lp)
    assert out.status == "infeasible"
    assert out.y is None
    # pi^T A <= 0 over the standard form [G I; 1 0] and pi^T b > 0
    A = np.array([[1, 1, 1, 1], [1, 1, 1, 0]], float)
    b = np.array([-0.5, 1.0])
    assert np.all(out.farkas @ A <= 1e-12)
    assert out.farkas @ b > 0


def test_iteration_limit(gstar):
    out = feasible_point(build_ce_polytope(gstar), iteration_limit=1)
    assert out.status == "iteration-limit"


def test_lp_text_roundtrip(gstar):
    lp = build_ce_polytope(gstar).with_objective(total_cost_objective(gstar))
    text = dump_lp(lp)
    assert text.splitlines()[0] == "lp 4 4"
    assert text.splitlines()[-1] == "eq 1 1 1 1 = 1"
    back = parse_lp(text)
    assert np.array_equal(back.G, lp.G) and np.array_equal(back.c, lp.c)
    assert back.rows == lp.rows


@pytest.mark.parametrize("counts", [(2, 2), (3, 3), (5, 5), (2, 5), (3, 3, 3)])
def test_pure_bland_terminates_in_scope(counts):
    rng = np.random.default_rng(17)
    for _ in range(20):
        g = random_game(rng, counts)
        out = feasible_point(build_ce_polytope(g), rule="bland")
        assert out.status == "feasible"
        assert check_ce(g, out.y, 1e-7).holds


def test_larger_games_feasible():
    rng = np.random.default_rng(4)
    for counts in [(10, 10), (5, 5, 5), (2, 3, 4, 2)]:
        g = random_game(rng, counts)
        out = feasible_point(build_ce_polytope(g))
        assert out.status == "feasible"
        assert check_ce(g, out.y, 1e-7).holds


def test_cycling_example_reaches_optimum():
    # Beale's LP cycles under plain Dantzig pricing with lowest-index ties
    A = np.array([[0.25, -8, -1, 9, 1, 0, 0], [0.5, -12, -0.5, 3, 0, 1, 0], [0, 0, 1, 0, 0, 0, 1.0]])
    b = np.array([0.0, 0.0, 1.0])
    c = np.array([-0.75, 20, -0.5, 6, 0, 0, 0])
    for rule in RULES:
        tab = _Tableau(A, b, [4, 5, 6], PIVOT_TOL, 1000)
        tab.set_objective(c)
        assert tab.run(7, OPT_TOL, rule) == "optimal"
        assert -tab.T[-1, -1] == pytest.approx(-1.25, abs=1e-12)


def test_unknown_rule(gstar):
    with pytest.raises(ValueError):
        feasible_point(build_ce_polytope(gstar), rule="steepest")
