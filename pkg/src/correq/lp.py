"""The correlated-equilibrium polytope and a dense two-phase simplex solver.

The polytope is ``{y : G y <= h, sum(y) = 1, y >= 0}`` with one row of ``G``
per ordered swap ``(player i, a -> b)``, a != b. Row order: players
ascending, then ``a`` ascending, then ``b`` ascending skipping ``a``.
Columns are flat joint-action indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .game import NormalFormGame

PIVOT_TOL = 1e-11
FEAS_TOL = 1e-8
OPT_TOL = 1e-9
MAX_ROWS = 10**6
REL_PIVOT_TOL = 1e-9
NOISE_TOL = 1e-13
REFACTOR_EVERY = 16
RULES = ("hybrid", "bland")


class SwapRow(NamedTuple):
    player: int
    from_action: int
    to_action: int


@dataclass(frozen=True)
class LinearProgram:
    G: np.ndarray
    h: np.ndarray
    c: np.ndarray | None = None
    rows: tuple[SwapRow, ...] = ()

    @property
    def n(self) -> int:
        return self.G.shape[1]

    @property
    def m(self) -> int:
        return self.G.shape[0]

    def with_objective(self, c) -> "LinearProgram":
        c = np.asarray(c, dtype=np.float64)
        if c.shape != (self.n,):
            raise ValueError(f"objective has shape {c.shape}, expected ({self.n},)")
        return replace(self, c=c)

    def residual(self, y: np.ndarray) -> float:
        """Largest violation of any constraint at ``y``."""
        parts = [abs(y.sum() - 1.0), max(0.0, float(-y.min()))]
        if self.m:
            parts.append(max(0.0, float((self.G @ y - self.h).max())))
        return max(parts)


def build_ce_polytope(game: NormalFormGame, max_rows: int = MAX_ROWS) -> LinearProgram:
    n_rows = sum(a * (a - 1) for a in game.action_counts)
    if n_rows > max_rows:
        raise OverflowError(f"polytope would have {n_rows} rows, cap is {max_rows}")
    size = game.num_joint_actions
    G = np.zeros((n_rows, size))
    labels = []
    flat = np.arange(size).reshape(game.action_counts)
    r = 0
    for i, n in enumerate(game.action_counts):
        cols = np.moveaxis(flat, i, 0).reshape(n, -1)
        cost = np.moveaxis(game.cost_tensor(i), i, 0).reshape(n, -1)
        for a in range(n):
            for b in range(n):
                if a == b:
                    continue
                G[r, cols[a]] = cost[a] - cost[b]
                labels.append(SwapRow(i, a, b))
                r += 1
    return LinearProgram(G, np.zeros(n_rows), None, tuple(labels))


@dataclass
class SolveOutcome:
    status: str  # optimal | feasible | infeasible | numeric-failure | iteration-limit
    y: np.ndarray | None = None
    objective: float | None = None
    iterations: int = 0
    pivots: int = 0
    residual: float | None = None
    min_reduced_cost: float | None = None
    farkas: np.ndarray | None = None
    pivot_log: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("optimal", "feasible")

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "y": None if self.y is None else self.y.tolist(),
            "objective": self.objective,
            "iterations": self.iterations,
            "pivots": self.pivots,
            "residual": self.residual,
        }


class _Tableau:
    """Dense tableau over ``A x = b, x >= 0`` with ``b >= 0``.

    The last row holds reduced costs and the negated objective value.
    """

    def __init__(self, A, b, basis, pivot_tol, iteration_limit, refactor_every=REFACTOR_EVERY):
        m, n = A.shape
        self.A = np.hstack([A, b[:, None]])
        self.T = np.zeros((m + 1, n + 1))
        self.T[:m] = self.A
        self.c = np.zeros(n)
        self.refactor_every = refactor_every
        self.basis = list(basis)
        # thresholds are relative to the largest constraint coefficient
        self.scale = max(1.0, float(np.abs(A).max()))
        self.pivot_tol = pivot_tol * self.scale
        self.noise_tol = NOISE_TOL * self.scale
        self.iteration_limit = iteration_limit
        self.iterations = 0
        self.pivots = 0
        self.log = []

    @property
    def m(self):
        return self.T.shape[0] - 1

    def set_objective(self, c):
        n = self.T.shape[1] - 1
        self.c = np.zeros(n)
        self.c[: len(c)] = c
        self._price()

    def _price(self):
        row = np.zeros(self.T.shape[1])
        row[:-1] = self.c
        for r, j in enumerate(self.basis):
            row -= row[j] * self.T[r]
        self.T[-1] = row

    def refactor(self):
        """Rebuild the tableau from the original rows and the current basis."""
        B = self.A[:, self.basis]
        try:
            fresh = np.linalg.solve(B, self.A)
        except np.linalg.LinAlgError:
            return  # keep the updated tableau; a later refactor may succeed
        if not np.all(np.isfinite(fresh)):
            return
        self.T[:-1] = fresh
        self.T[:-1, self.basis] = np.eye(len(self.basis))
        self._price()

    def drop_rows(self, keep, n_cols):
        cols = list(range(n_cols)) + [-1]
        self.A = self.A[keep][:, cols]
        self.T = np.vstack([self.T[keep][:, cols], np.zeros((1, n_cols + 1))])
        self.basis = [self.basis[r] for r in keep]
        self.c = self.c[:n_cols]

    def pivot(self, r, j):
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.pivots += 1
        self.log.append((r, j))
        if self.pivots % self.refactor_every == 0:
            self.refactor()
        # round-off must not turn into pivot candidates or negative basics
        T[np.abs(T) < self.noise_tol] = 0.0
        rhs = T[:-1, -1]
        rhs[(rhs < 0) & (rhs > -self.pivot_tol)] = 0.0

    def run(self, allowed: int, opt_tol: float, rule: str = "hybrid") -> str:
        """Price with Dantzig's rule, or Bland's rule (lowest improving index).

        Under ``hybrid`` the bases seen along a run of degenerate pivots are
        remembered; once one repeats, Bland's rule takes over until the
        objective moves again, which rules out cycling. The leaving row is
        always the lowest basic index among ratio-test ties.
        """
        T = self.T
        seen: set[tuple[int, ...]] = set()
        bland = rule == "bland"
        while True:
            if self.iterations >= self.iteration_limit:
                return "iteration-limit"
            self.iterations += 1
            red = T[-1, :allowed]
            candidates = np.flatnonzero(red < -opt_tol)
            if candidates.size == 0:
                return "optimal"
            if bland:
                j = int(candidates[0])
            else:
                j = int(candidates[np.argmin(red[candidates])])
            colj = T[:-1, j]
            # entries far below the column's largest are round-off, not pivots
            floor = max(self.pivot_tol, REL_PIVOT_TOL * float(np.abs(colj).max()))
            rows = np.flatnonzero(colj > floor)
            if rows.size == 0:
                return "unbounded"
            ratios = T[rows, -1] / colj[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
            r = int(min(ties, key=lambda k: self.basis[k]))
            self.pivot(r, j)
            if rule == "bland":
                continue
            if best > 0:
                seen.clear()
                bland = False
            else:
                key = tuple(sorted(self.basis))
                if key in seen:
                    bland = True
                seen.add(key)

    def solution(self, n, feas_tol):
        x = np.zeros(n)
        for r, j in enumerate(self.basis):
            if j < n:
                x[j] = self.T[r, -1]
        x[(x < 0) & (x >= -feas_tol)] = 0.0
        return x


def _standard_form(lp: LinearProgram):
    """``[G I; 1 0] [y; s] = [h; 1]`` with slacks ``s >= 0``."""
    m, n = lp.G.shape
    # a positive row scale leaves the feasible set unchanged
    scale = np.abs(lp.G).max(axis=1) if n else np.ones(m)
    scale = np.where(scale > 0, scale, 1.0)
    A = np.zeros((m + 1, n + m))
    A[:m, :n] = lp.G / scale[:, None]
    A[:m, n:] = np.eye(m)
    A[m, :n] = 1.0
    b = np.concatenate([lp.h / scale, [1.0]])
    return A, b, np.concatenate([scale, [1.0]])


def _solve(lp: LinearProgram, c, *, feas_tol, pivot_tol, opt_tol, iteration_limit, rule) -> SolveOutcome:
    if rule not in RULES:
        raise ValueError(f"unknown pricing rule {rule!r}; expected one of {RULES}")
    A, b, row_scale = _standard_form(lp)
    m, n_std = A.shape
    n = lp.n
    if iteration_limit is None:
        iteration_limit = 50 * (m + n_std)
    sign = np.where(b < 0, -1.0, 1.0)
    A = A * sign[:, None]
    b = b * sign

    # slack columns serve as the initial basis where their row was not flipped
    basis = [None] * m
    for r in range(m - 1):
        if sign[r] > 0:
            basis[r] = n + r
    art_rows = [r for r in range(m) if basis[r] is None]
    A1 = np.hstack([A, np.zeros((m, len(art_rows)))])
    for k, r in enumerate(art_rows):
        A1[r, n_std + k] = 1.0
        basis[r] = n_std + k

    tab = _Tableau(A1, b, basis, pivot_tol, iteration_limit)
    phase1_c = np.zeros(A1.shape[1])
    phase1_c[n_std:] = 1.0
    tab.set_objective(phase1_c)
    status = tab.run(n_std, opt_tol, rule)
    out = SolveOutcome("numeric-failure")
    if status == "iteration-limit":
        return _finish(out, "iteration-limit", tab)
    if status == "unbounded":
        return _finish(out, "numeric-failure", tab)
    infeas = -tab.T[-1, -1]
    if infeas > feas_tol:
        B = A1[:, tab.basis]
        pi = np.linalg.solve(B.T, phase1_c[tab.basis])
        out.farkas = pi * sign / row_scale
        out.residual = infeas
        return _finish(out, "infeasible", tab)

    # drive zero-valued artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if tab.basis[r] >= n_std:
            cols = np.flatnonzero(np.abs(tab.T[r, :n_std]) > tab.pivot_tol)
            if cols.size == 0:
                continue
            tab.pivot(r, int(cols[0]))
        keep.append(r)
    tab.drop_rows(keep, n_std)

    if c is None:
        y = tab.solution(n, feas_tol)
        out.y = y
        out.objective = 0.0 if lp.c is None else float(lp.c @ y)
        out.residual = lp.residual(y)
        return _finish(out, "feasible", tab)

    c_std = np.zeros(n_std)
    c_std[:n] = c
    tab.set_objective(c_std)
    status = tab.run(n_std, opt_tol, rule)
    if status == "iteration-limit":
        return _finish(out, "iteration-limit", tab)
    if status == "unbounded":
        return _finish(out, "numeric-failure", tab)
    y = tab.solution(n, feas_tol)
    out.y = y
    out.objective = float(c @ y)
    out.residual = lp.residual(y)
    out.min_reduced_cost = float(tab.T[-1, :n_std].min())
    return _finish(out, "optimal", tab)


def _finish(out: SolveOutcome, status: str, tab: _Tableau) -> SolveOutcome:
    out.status = status
    out.iterations = tab.iterations
    out.pivots = tab.pivots
    out.pivot_log = list(tab.log)
    return out


def feasible_point(
    lp: LinearProgram,
    *,
    feas_tol: float = FEAS_TOL,
    pivot_tol: float = PIVOT_TOL,
    opt_tol: float = OPT_TOL,
    iteration_limit: int | None = None,
    rule: str = "hybrid",
) -> SolveOutcome:
    """Phase-1 simplex: some vertex of the polytope, or an infeasibility certificate."""
    return _solve(lp, None, feas_tol=feas_tol, pivot_tol=pivot_tol, opt_tol=opt_tol,
                  iteration_limit=iteration_limit, rule=rule)


def minimize_linear(
    lp: LinearProgram,
    c=None,
    *,
    feas_tol: float = FEAS_TOL,
    pivot_tol: float = PIVOT_TOL,
    opt_tol: float = OPT_TOL,
    iteration_limit: int | None = None,
    rule: str = "hybrid",
) -> SolveOutcome:
    if c is None:
        if lp.c is None:
            raise ValueError("minimize_linear needs an objective")
        c = lp.c
    c = np.asarray(c, dtype=np.float64)
    if c.shape != (lp.n,):
        raise ValueError(f"objective has shape {c.shape}, expected ({lp.n},)")
    return _solve(lp, c, feas_tol=feas_tol, pivot_tol=pivot_tol, opt_tol=opt_tol,
                  iteration_limit=iteration_limit, rule=rule)


# -- plain-text export ------------------------------------------------------
#
#   lp <n> <m>
#   obj <c_0> ... <c_{n-1}>            (only when an objective is set)
#   ineq <player> <from> <to> <g_0> ... <g_{n-1}> <= <h>
#   eq 1 ... 1 = 1
#
# Columns are flat joint indices; all variables are implicitly >= 0.


def _fmt(v: float) -> str:
    return repr(float(v))


def dump_lp(lp: LinearProgram) -> str:
    lines = [f"lp {lp.n} {lp.m}"]
    if lp.c is not None:
        lines.append("obj " + " ".join(_fmt(v) for v in lp.c))
    for k in range(lp.m):
        label = lp.rows[k] if lp.rows else SwapRow(-1, -1, -1)
        coeffs = " ".join(_fmt(v) for v in lp.G[k])
        lines.append(f"ineq {label.player} {label.from_action} {label.to_action} {coeffs} <= {_fmt(lp.h[k])}")
    lines.append("eq " + " ".join(["1"] * lp.n) + " = 1")
    return "\n".join(lines) + "\n"


def parse_lp(text: str) -> LinearProgram:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    head = lines[0]
    if head[0] != "lp":
        raise ValueError("LP text must start with an 'lp <n> <m>' line")
    n, m = int(head[1]), int(head[2])
    c = None
    G = np.zeros((m, n))
    h = np.zeros(m)
    rows = []
    k = 0
    for parts in lines[1:]:
        if parts[0] == "obj":
            c = np.array([float(v) for v in parts[1:]])
        elif parts[0] == "ineq":
            rows.append(SwapRow(int(parts[1]), int(parts[2]), int(parts[3])))
            G[k] = [float(v) for v in parts[4 : 4 + n]]
            h[k] = float(parts[-1])
            k += 1
    if k != m:
        raise ValueError(f"expected {m} inequality rows, found {k}")
    return LinearProgram(G, h, c, tuple(rows))


def total_cost_objective(game: NormalFormGame) -> np.ndarray:
    return game.costs.sum(axis=0)


def row_count(game: NormalFormGame) -> int:
    return sum(a * (a - 1) for a in game.action_counts)

