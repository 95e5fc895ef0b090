"""Bundled reference LP solver: bounded-variable two-phase revised simplex.

Dense algebra throughout, sized for desk-scale models (hundreds to a few
thousand rows).  The basis inverse is kept explicitly and updated by
elementary row operations, with periodic refactorization.  Dantzig pricing
with a permanent switch to Bland's rule after a long run of degenerate
pivots.

:func:`prepare` builds the dense row data once; :func:`solve_prepared`
solves it under caller-supplied variable bounds, which is what lets the
branch-and-bound and the fixing heuristic re-solve the same matrix under
many bound vectors without rebuilding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .milp import BINARY, EQ, GE, Assignment, Model

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_AT_LOWER = 0
_AT_UPPER = 1
_BASIC = 2

_DTOL = 1e-9        # reduced-cost tolerance
_PIVTOL = 1e-9      # smallest rate treated as blocking
_FEASTOL = 1e-7     # phase-1 residual accepted as feasible
_BLAND_AFTER = 1000 # consecutive degenerate pivots before Bland's rule
_REFACTOR_EVERY = 150


@dataclass(frozen=True)
class LpResult:
    status: str
    objective: float | None = None
    assignment: Assignment | None = None


@dataclass
class PreparedLp:
    model: Model
    rows: np.ndarray     # (m, n) dense, >= rows negated to <=
    rhs: np.ndarray      # (m,)
    is_eq: np.ndarray    # (m,) bool
    costs: np.ndarray    # (n,)


def prepare(model: Model) -> PreparedLp:
    n = len(model.variables)
    m = len(model.constraints)
    rows = np.zeros((m, n))
    rhs = np.zeros(m)
    is_eq = np.zeros(m, dtype=bool)
    for i, con in enumerate(model.constraints):
        for vid, coef in con.terms:
            rows[i, vid] = coef
        rhs[i] = con.rhs
        if con.sense == GE:
            rows[i] *= -1.0
            rhs[i] = -rhs[i]
        elif con.sense == EQ:
            is_eq[i] = True
    costs = np.zeros(n)
    for vid, cost in model.objective.items():
        costs[vid] += cost
    return PreparedLp(model, rows, rhs, is_eq, costs)


def solve_lp(model: Model) -> LpResult:
    """Solve a pure-LP model. Binary variables are a contract violation:
    callers relax first."""
    for v in model.variables:
        if v.kind == BINARY:
            raise ValueError(f"solve_lp called on model with binary variable {v.name!r}")
    prep = prepare(model)
    lo = np.array([v.lower for v in model.variables])
    hi = np.array([v.upper for v in model.variables])
    return solve_prepared(prep, lo, hi)


def solve_prepared(prep: PreparedLp, lo: np.ndarray, hi: np.ndarray) -> LpResult:
    status, x = _two_phase(prep, np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    if status != OPTIMAL:
        return LpResult(status)
    x = np.clip(x, lo, hi)
    objective = float(prep.costs @ x)
    assignment: Assignment = {i: float(x[i]) for i in range(len(x))}
    return LpResult(OPTIMAL, objective, assignment)


def _two_phase(prep: PreparedLp, lo_s: np.ndarray, hi_s: np.ndarray) -> tuple[str, np.ndarray]:
    m, n = prep.rows.shape
    if np.any(lo_s > hi_s + 1e-12):
        return INFEASIBLE, np.empty(0)
    for j in range(n):
        if lo_s[j] == -math.inf and hi_s[j] == math.inf:
            raise ValueError("free variables are not supported by the bundled simplex")

    # Columns: [structural | one slack per row | artificials as needed].
    # Slacks are [0, inf) for <= rows and fixed [0, 0] for = rows.
    slack_lo = np.zeros(m)
    slack_hi = np.where(prep.is_eq, 0.0, math.inf)
    lo = np.concatenate([lo_s, slack_lo])
    hi = np.concatenate([hi_s, slack_hi])
    a = np.hstack([prep.rows, np.eye(m)]) if m else prep.rows.copy()

    # Nonbasic start: every structural at a finite bound.
    x = np.zeros(n + m)
    state = np.full(n + m, _AT_LOWER, dtype=np.int8)
    for j in range(n):
        if lo[j] == -math.inf:
            x[j], state[j] = hi[j], _AT_UPPER
        else:
            x[j] = lo[j]

    residual = prep.rhs - prep.rows @ x[:n] if m else np.empty(0)
    basis = np.empty(m, dtype=int)
    art_cols: list[np.ndarray] = []
    art_rows: list[int] = []
    for i in range(m):
        r = residual[i]
        if not prep.is_eq[i] and r >= 0.0:
            basis[i] = n + i          # slack carries the row
            x[n + i] = r
            state[n + i] = _BASIC
        else:
            col = np.zeros(m)
            col[i] = 1.0 if r >= 0 else -1.0
            art_cols.append(col)
            art_rows.append(i)
            basis[i] = n + m + len(art_cols) - 1
    n_art = len(art_cols)
    if n_art:
        a = np.hstack([a, np.column_stack(art_cols)])
        lo = np.concatenate([lo, np.zeros(n_art)])
        hi = np.concatenate([hi, np.full(n_art, math.inf)])
        x = np.concatenate([x, np.abs(residual[art_rows])])
        state = np.concatenate([state, np.full(n_art, _BASIC, dtype=np.int8)])

    if n_art:
        phase1_cost = np.zeros(n + m + n_art)
        phase1_cost[n + m :] = 1.0
        status = _simplex(a, prep.rhs, phase1_cost, lo, hi, basis, state, x, phase=1)
        if status != OPTIMAL:
            raise ArithmeticError("phase-1 simplex terminated abnormally")
        rhs_scale = float(np.abs(prep.rhs).max()) if m else 1.0
        if float(x[n + m :].sum()) > _FEASTOL * max(1.0, rhs_scale):
            return INFEASIBLE, np.empty(0)
        # Pin artificials at zero for phase 2; basic ones may linger at 0.
        lo[n + m :] = 0.0
        hi[n + m :] = 0.0
        x[n + m :] = np.where(state[n + m :] == _BASIC, x[n + m :], 0.0)

    cost = np.zeros(n + m + n_art)
    cost[:n] = prep.costs
    status = _simplex(a, prep.rhs, cost, lo, hi, basis, state, x, phase=2)
    if status == UNBOUNDED:
        return UNBOUNDED, np.empty(0)
    return OPTIMAL, x[:n].copy()


def _simplex(a, b, c, lo, hi, basis, state, x, phase: int) -> str:
    m, k = a.shape
    if m == 0:
        # Pure box problem: push each variable to its attractive bound.
        for j in range(k):
            if c[j] < -_DTOL:
                if hi[j] == math.inf:
                    return UNBOUNDED
                x[j], state[j] = hi[j], _AT_UPPER
            elif c[j] > _DTOL and lo[j] == -math.inf:
                return UNBOUNDED
        return OPTIMAL

    binv = np.linalg.inv(a[:, basis])
    fixed = lo == hi
    degenerate_run = 0
    bland = False
    max_iter = 50_000 + 60 * (m + k)

    for it in range(max_iter):
        if it and it % _REFACTOR_EVERY == 0:
            binv = np.linalg.inv(a[:, basis])
            _recompute_basics(a, b, basis, state, x, binv)

        y = c[basis] @ binv
        d = c - y @ a
        can_up = (state == _AT_LOWER) & ~fixed & (d < -_DTOL)
        can_dn = (state == _AT_UPPER) & ~fixed & (d > _DTOL)
        if not (can_up.any() or can_dn.any()):
            # Refactorize once so the reported point carries no update drift.
            binv = np.linalg.inv(a[:, basis])
            _recompute_basics(a, b, basis, state, x, binv)
            return OPTIMAL

        if bland:
            candidates = np.flatnonzero(can_up | can_dn)
            j = int(candidates[0])
        else:
            score = np.where(can_up, -d, 0.0) + np.where(can_dn, d, 0.0)
            j = int(np.argmax(score))
        direction = 1.0 if state[j] == _AT_LOWER else -1.0

        w = binv @ a[:, j]
        rate = -direction * w  # d x_B / dt
        t_bound = hi[j] - lo[j]

        limits = np.full(m, math.inf)
        up_block = rate > _PIVTOL
        dn_block = rate < -_PIVTOL
        bx = x[basis]
        with np.errstate(invalid="ignore"):
            limits[up_block] = (hi[basis[up_block]] - bx[up_block]) / rate[up_block]
            limits[dn_block] = (bx[dn_block] - lo[basis[dn_block]]) / (-rate[dn_block])
        limits = np.maximum(limits, 0.0)
        t_basic = float(limits.min()) if m else math.inf
        t = min(t_bound, t_basic)

        if t == math.inf:
            return UNBOUNDED if phase == 2 else _raise_phase1_unbounded()

        if t <= 1e-12:
            degenerate_run += 1
            if degenerate_run > _BLAND_AFTER:
                bland = True
        else:
            degenerate_run = 0

        if t_bound <= t_basic:
            # Bound flip: the entering variable traverses its whole span.
            x[basis] = bx - direction * w * t
            x[j] = hi[j] if direction > 0 else lo[j]
            state[j] = _AT_UPPER if direction > 0 else _AT_LOWER
            continue

        near = np.flatnonzero(limits <= t + 1e-9)
        if bland:
            r = int(near[np.argmin(basis[near])])
        else:
            r = int(near[np.argmax(np.abs(rate[near]))])
        leave = int(basis[r])

        x[basis] = bx - direction * w * t
        x[j] += direction * t
        x[leave] = hi[leave] if rate[r] > 0 else lo[leave]
        state[leave] = _AT_UPPER if rate[r] > 0 else _AT_LOWER
        basis[r] = j
        state[j] = _BASIC

        piv = w[r]
        if abs(piv) < 1e-11:
            binv = np.linalg.inv(a[:, basis])
            _recompute_basics(a, b, basis, state, x, binv)
            continue
        binv[r, :] /= piv
        others = np.arange(m) != r
        binv[others, :] -= np.outer(w[others], binv[r, :])

    raise ArithmeticError("simplex iteration limit exceeded")


def _raise_phase1_unbounded() -> str:
    raise ArithmeticError("phase-1 objective unbounded; numerical breakdown")


def _recompute_basics(a, b, basis, state, x, binv) -> None:
    nonbasic = state != _BASIC
    x[basis] = binv @ (b - a[:, nonbasic] @ x[nonbasic])
