"""Bounded-variable linear programs and their solution.

Two engines sit behind :func:`solve_lp`:

* ``"highs"`` (default) hands the problem to HiGHS through
  :func:`scipy.optimize.linprog`.  Used for every scenario program.
* ``"simplex"`` is a dense two-phase bounded-variable primal simplex meant
  for small problems.  It switches from Dantzig pricing to Bland's rule once
  the number of consecutive degenerate pivots exceeds
  ``SolverOptions.degeneracy_threshold``.

Row duals are reported as sensitivities ``d(objective)/d(rhs)`` in the
problem's own sense (min or max).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

__all__ = [
    "LinearProgram",
    "LpStatus",
    "LpSolution",
    "SolverOptions",
    "ResidualReport",
    "solve_lp",
    "verify_solution",
]


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration-limit"
    ERROR = "error"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``min|max c@x + offset  s.t.  A@x (<=|=|>=) b,  lb <= x <= ub``.

    ``senses`` holds one of ``"L"``, ``"E"``, ``"G"`` per row.  Infinite
    bounds are allowed.
    """

    c: np.ndarray
    A: sp.csr_matrix
    senses: np.ndarray
    b: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    maximize: bool = False
    offset: float = 0.0
    col_names: tuple[str, ...] | None = None
    row_names: tuple[str, ...] | None = None

    def __post_init__(self):
        c = np.array(self.c, dtype=float).reshape(-1)
        n = c.size
        A = sp.csr_matrix(self.A, dtype=float)
        if A.shape[1] != n and A.shape[0] == 0:
            A = sp.csr_matrix((0, n))
        m = A.shape[0]
        senses = np.array(self.senses, dtype="<U1").reshape(-1)
        b = np.array(self.b, dtype=float).reshape(-1)
        lb = np.broadcast_to(np.array(self.lb, dtype=float), (n,)).copy()
        ub = np.broadcast_to(np.array(self.ub, dtype=float), (n,)).copy()
        if A.shape != (m, n) or senses.size != m or b.size != m:
            raise ValueError(f"inconsistent dimensions: A{A.shape}, senses {senses.size}, b {b.size}, c {n}")
        if not set(senses.tolist()) <= {"L", "E", "G"}:
            raise ValueError("row senses must be 'L', 'E' or 'G'")
        for name, arr in (("c", c), ("b", b), ("A", A.data)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must contain only finite values")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)):
            raise ValueError("bounds must not be NaN")
        if np.any(lb > ub):
            j = int(np.flatnonzero(lb > ub)[0])
            raise ValueError(f"variable {j}: lower bound {lb[j]} exceeds upper bound {ub[j]}")
        if self.col_names is not None and len(self.col_names) != n:
            raise ValueError("col_names length mismatch")
        if self.row_names is not None and len(self.row_names) != m:
            raise ValueError("row_names length mismatch")
        for arr in (c, senses, b, lb, ub):
            arr.flags.writeable = False
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "senses", senses)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)

    @classmethod
    def from_triplets(cls, c, rows, cols, vals, senses, b, lb=0.0, ub=np.inf, maximize=False, **kw):
        c = np.asarray(c, dtype=float)
        A = sp.coo_matrix((vals, (rows, cols)), shape=(len(senses), c.size)).tocsr()
        return cls(c, A, senses, b, lb, ub, maximize, **kw)

    @classmethod
    def from_dense(cls, c, A, senses, b, lb=0.0, ub=np.inf, maximize=False, **kw):
        c = np.asarray(c, dtype=float)
        A = np.asarray(A, dtype=float).reshape(-1, c.size)
        return cls(c, sp.csr_matrix(A), senses, b, lb, ub, maximize, **kw)

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def with_bounds(self, lb=None, ub=None) -> "LinearProgram":
        return replace(self, lb=self.lb if lb is None else lb, ub=self.ub if ub is None else ub)

    def objective(self, x) -> float:
        return float(self.c @ np.asarray(x, dtype=float)) + self.offset


@dataclass
class LpSolution:
    status: LpStatus
    x: np.ndarray | None = None
    objective: float = float("nan")
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    iterations: int = 0
    wall_time: float = 0.0
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-7
    opt_tol: float = 1e-7
    max_iter: int | None = None
    degeneracy_threshold: int = 50
    time_limit: float | None = None
    method: str = "highs"

    def __post_init__(self):
        if self.feas_tol <= 0 or self.opt_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.method not in ("highs", "simplex"):
            raise ValueError(f"unknown LP method {self.method!r}")


def solve_lp(lp: LinearProgram, opts: SolverOptions | None = None) -> LpSolution:
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    if opts.method == "simplex":
        sol = _solve_simplex(lp, opts)
    else:
        sol = _solve_highs(lp, opts)
    sol.wall_time = time.perf_counter() - t0
    return sol


# ----------------------------------------------------------------- HiGHS path


_HIGHS_STATUS = {
    0: LpStatus.OPTIMAL,
    1: LpStatus.ITERATION_LIMIT,
    2: LpStatus.INFEASIBLE,
    3: LpStatus.UNBOUNDED,
    4: LpStatus.ERROR,
}


def _solve_highs(lp: LinearProgram, opts: SolverOptions) -> LpSolution:
    sign = -1.0 if lp.maximize else 1.0
    is_l = lp.senses == "L"
    is_g = lp.senses == "G"
    is_e = lp.senses == "E"
    ub_rows = np.flatnonzero(is_l | is_g)
    eq_rows = np.flatnonzero(is_e)
    flip = np.where(is_g[ub_rows], -1.0, 1.0)
    A_ub = sp.diags(flip) @ lp.A[ub_rows] if ub_rows.size else None
    b_ub = flip * lp.b[ub_rows] if ub_rows.size else None
    A_eq = lp.A[eq_rows] if eq_rows.size else None
    b_eq = lp.b[eq_rows] if eq_rows.size else None
    options = {
        "primal_feasibility_tolerance": opts.feas_tol,
        "dual_feasibility_tolerance": opts.opt_tol,
        "presolve": True,
    }
    if opts.max_iter is not None:
        options["maxiter"] = int(opts.max_iter)
    if opts.time_limit is not None:
        options["time_limit"] = float(opts.time_limit)
    bounds = np.column_stack([lp.lb, lp.ub]) if lp.n_vars else None
    res = linprog(
        sign * lp.c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
        bounds=bounds, method="highs", options=options,
    )
    status = _HIGHS_STATUS.get(res.status, LpStatus.ERROR)
    if status is LpStatus.ERROR and "infeasible" in (res.message or "").lower():
        status = LpStatus.INFEASIBLE
    sol = LpSolution(status=status, iterations=int(getattr(res, "nit", 0) or 0), message=res.message)
    if status is not LpStatus.OPTIMAL:
        return sol
    x = np.asarray(res.x, dtype=float)
    duals = np.zeros(lp.n_rows)
    if ub_rows.size:
        duals[ub_rows] = flip * res.ineqlin.marginals
    if eq_rows.size:
        duals[eq_rows] = res.eqlin.marginals
    rc = np.asarray(res.lower.marginals) + np.asarray(res.upper.marginals)
    sol.x = x
    sol.objective = lp.objective(x)
    sol.duals = sign * duals
    sol.reduced_costs = sign * rc
    return sol


# --------------------------------------------------------------- dense simplex


_AT_LOWER, _AT_UPPER, _FREE, _BASIC = 0, 1, 2, 3


def _solve_simplex(lp: LinearProgram, opts: SolverOptions) -> LpSolution:
    """Two-phase bounded-variable primal simplex on a dense copy of ``lp``."""
    m, n = lp.n_rows, lp.n_vars
    A = lp.A.toarray()
    sign = -1.0 if lp.maximize else 1.0
    # slacks turn every row into an equality: L rows get +s, G rows -s, s >= 0
    n_slack = int(np.sum(lp.senses != "E"))
    S = np.zeros((m, n_slack))
    k = 0
    for i, s in enumerate(lp.senses):
        if s != "E":
            S[i, k] = 1.0 if s == "L" else -1.0
            k += 1
    Af = np.hstack([A, S])
    cf = np.concatenate([sign * lp.c, np.zeros(n_slack)])
    lb = np.concatenate([lp.lb, np.zeros(n_slack)])
    ub = np.concatenate([lp.ub, np.full(n_slack, np.inf)])
    nf = n + n_slack

    # nonbasic start: finite lower, else finite upper, else 0 (free)
    x = np.where(np.isfinite(lb), lb, np.where(np.isfinite(ub), ub, 0.0))
    state = np.where(np.isfinite(lb), _AT_LOWER, np.where(np.isfinite(ub), _AT_UPPER, _FREE))
    r = lp.b - Af @ x
    art_sign = np.where(r >= 0, 1.0, -1.0)
    Aa = np.hstack([Af, np.diag(art_sign)])
    la = np.concatenate([lb, np.zeros(m)])
    ua = np.concatenate([ub, np.full(m, np.inf)])
    xa = np.concatenate([x, np.abs(r)])
    state = np.concatenate([state, np.full(m, _BASIC)])
    basis = list(range(nf, nf + m))
    max_iter = opts.max_iter if opts.max_iter is not None else 50 * (nf + m) + 1000
    iters = 0

    c1 = np.concatenate([np.zeros(nf), np.ones(m)])
    status, iters = _simplex_loop(Aa, lp.b, c1, la, ua, xa, state, basis, opts, max_iter, iters)
    if status is LpStatus.ITERATION_LIMIT:
        return LpSolution(LpStatus.ITERATION_LIMIT, iterations=iters)
    infeas = float(np.sum(xa[nf:]))
    scale = 1.0 + float(np.max(np.abs(lp.b), initial=0.0))
    if infeas > opts.feas_tol * scale:
        return LpSolution(LpStatus.INFEASIBLE, iterations=iters)

    # phase 2: artificials pinned to zero
    ua[nf:] = 0.0
    xa[nf:] = 0.0
    for j in range(nf, nf + m):
        if state[j] != _BASIC:
            state[j] = _AT_LOWER
    c2 = np.concatenate([cf, np.zeros(m)])
    status, iters = _simplex_loop(Aa, lp.b, c2, la, ua, xa, state, basis, opts, max_iter, iters)
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, iterations=iters)

    B = Aa[:, basis]
    y = np.linalg.solve(B.T, c2[basis])
    d = c2 - Aa.T @ y
    xs = xa[:n].copy()
    # row sensitivities wrt b; reduced costs of structural columns
    duals = sign * y
    rc = np.where(state[:n] == _BASIC, 0.0, sign * d[:n])
    return LpSolution(
        LpStatus.OPTIMAL, x=xs, objective=lp.objective(xs), duals=duals,
        reduced_costs=rc, iterations=iters,
    )


def _simplex_loop(A, b, c, lb, ub, x, state, basis, opts, max_iter, iters):
    m, n = A.shape
    tol = opts.opt_tol
    ftol = opts.feas_tol
    degenerate_run = 0
    while True:
        if iters >= max_iter:
            return LpStatus.ITERATION_LIMIT, iters
        B = A[:, basis]
        nonbasic = state != _BASIC
        xB = np.linalg.solve(B, b - A[:, nonbasic] @ x[nonbasic])
        x[basis] = xB
        y = np.linalg.solve(B.T, c[basis])
        d = c - A.T @ y

        cand = np.flatnonzero(
            ((state == _AT_LOWER) & (d < -tol))
            | ((state == _AT_UPPER) & (d > tol))
            | ((state == _FREE) & (np.abs(d) > tol))
        )
        # a fixed variable at lower cannot move
        cand = cand[ub[cand] > lb[cand]]
        if cand.size == 0:
            return LpStatus.OPTIMAL, iters
        if degenerate_run >= opts.degeneracy_threshold:
            q = int(cand[0])  # Bland
        else:
            q = int(cand[np.argmax(np.abs(d[cand]))])  # argmax picks lowest index on ties
        direction = 1.0 if d[q] < 0 else -1.0

        alpha = np.linalg.solve(B, A[:, q])
        # basic variables move by -direction * alpha * t
        step = np.inf
        leave = -1
        leave_to_upper = False
        delta = -direction * alpha
        for pos in range(m):
            j = basis[pos]
            if delta[pos] > ftol * 1e-2:
                room = (ub[j] - x[j]) / delta[pos] if np.isfinite(ub[j]) else np.inf
                to_upper = True
            elif delta[pos] < -ftol * 1e-2:
                room = (lb[j] - x[j]) / delta[pos] if np.isfinite(lb[j]) else np.inf
                to_upper = False
            else:
                continue
            room = max(room, 0.0)
            better = room < step - 1e-12
            tie = abs(room - step) <= 1e-12 and leave >= 0
            if tie:
                if degenerate_run >= opts.degeneracy_threshold:
                    better = j < basis[leave]
                else:
                    better = abs(delta[pos]) > abs(delta[leave])
            if better:
                step, leave, leave_to_upper = room, pos, to_upper
        own = ub[q] - lb[q]
        if own < step:
            # bound flip, basis unchanged
            x[q] = ub[q] if direction > 0 else lb[q]
            state[q] = _AT_UPPER if direction > 0 else _AT_LOWER
            degenerate_run = 0
            iters += 1
            continue
        if not np.isfinite(step):
            return LpStatus.UNBOUNDED, iters
        degenerate_run = degenerate_run + 1 if step <= 1e-12 else 0
        x[q] = x[q] + direction * step
        x[basis] = x[basis] + delta * step
        out = basis[leave]
        x[out] = ub[out] if leave_to_upper else lb[out]
        state[out] = _AT_UPPER if leave_to_upper else _AT_LOWER
        state[q] = _BASIC
        basis[leave] = q
        iters += 1


# -------------------------------------------------------------- verification


@dataclass
class ResidualReport:
    passed: bool
    checked: bool
    primal_residual: float = float("nan")
    bound_violation: float = float("nan")
    dual_infeasibility: float = float("nan")
    complementarity: float = float("nan")
    duality_gap: float = float("nan")
    message: str = ""
    details: dict = field(default_factory=dict)


def _row_scale(lp: LinearProgram, x: np.ndarray) -> np.ndarray:
    absA = abs(lp.A)
    return np.maximum.reduce([np.ones(lp.n_rows), np.abs(lp.b), absA @ np.abs(x)]) if lp.n_rows else np.ones(0)


def verify_solution(lp: LinearProgram, sol: LpSolution, opts: SolverOptions | None = None) -> ResidualReport:
    """Check a solution against the problem data.

    Row residuals are measured relative to ``max(1, |b_i|, |A_i| @ |x|)``.
    Dual checks run only when duals are present.
    """
    opts = opts or SolverOptions()
    if sol.x is None:
        return ResidualReport(
            passed=sol.status in (LpStatus.INFEASIBLE, LpStatus.UNBOUNDED),
            checked=False, message="no primal certificate checked",
        )
    x = np.asarray(sol.x, dtype=float)
    Ax = lp.A @ x
    viol = np.zeros(lp.n_rows)
    viol = np.where(lp.senses == "L", np.maximum(Ax - lp.b, 0.0), viol)
    viol = np.where(lp.senses == "G", np.maximum(lp.b - Ax, 0.0), viol)
    viol = np.where(lp.senses == "E", np.abs(Ax - lp.b), viol)
    scale = _row_scale(lp, x)
    primal = float(np.max(viol / scale, initial=0.0))
    bound = float(max(np.max(lp.lb - x, initial=0.0), np.max(x - lp.ub, initial=0.0), 0.0))
    bound /= max(1.0, float(np.max(np.abs(x), initial=0.0)))
    report = ResidualReport(passed=True, checked=True, primal_residual=primal, bound_violation=bound)
    ok = primal <= opts.feas_tol * 10 and bound <= opts.feas_tol * 10

    if sol.duals is not None and sol.reduced_costs is not None:
        y = np.asarray(sol.duals, dtype=float)
        rc = np.asarray(sol.reduced_costs, dtype=float)
        # minimization convention: <= rows have y <= 0, >= rows y >= 0
        s = -1.0 if lp.maximize else 1.0
        ys = s * y
        dual_inf = np.zeros(lp.n_rows)
        dual_inf = np.where(lp.senses == "L", np.maximum(ys, 0.0), dual_inf)
        dual_inf = np.where(lp.senses == "G", np.maximum(-ys, 0.0), dual_inf)
        # stationarity: c = A^T y + rc
        stat = lp.c - (lp.A.T @ y + rc)
        cscale = max(1.0, float(np.max(np.abs(lp.c), initial=0.0)))
        report.dual_infeasibility = float(
            max(np.max(dual_inf, initial=0.0), np.max(np.abs(stat), initial=0.0)) / cscale
        )
        slack = np.where(lp.senses == "E", 0.0, np.abs(Ax - lp.b))
        compl = np.abs(y) * slack / scale
        lo_gap = np.where(np.isfinite(lp.lb), np.abs(x - lp.lb), np.inf)
        up_gap = np.where(np.isfinite(lp.ub), np.abs(lp.ub - x), np.inf)
        bgap = np.minimum(lo_gap, up_gap)
        bgap = np.where(np.isfinite(bgap), bgap, np.where(np.abs(rc) > 0, np.inf, 0.0))
        report.complementarity = float(
            max(np.max(compl, initial=0.0), np.max(np.abs(rc) * bgap / max(1.0, np.max(np.abs(x), initial=0.0)), initial=0.0))
        )
        rl = np.where(np.isfinite(lp.lb), lp.lb, 0.0)
        ru = np.where(np.isfinite(lp.ub), lp.ub, 0.0)
        at_upper = np.isfinite(lp.ub) & (np.abs(x - lp.ub) <= np.abs(x - rl))
        bound_term = np.where(at_upper, ru, rl) * rc
        dual_obj = float(lp.b @ y + bound_term.sum()) + lp.offset
        obj = lp.objective(x)
        report.duality_gap = abs(obj - dual_obj) / max(1.0, abs(obj))
        report.details["dual_objective"] = dual_obj
        ok = ok and report.dual_infeasibility <= opts.opt_tol * 100
        ok = ok and report.complementarity <= opts.opt_tol * 100
        ok = ok and report.duality_gap <= 1e-6
    report.passed = bool(ok)
    if not ok:
        report.message = "residual tolerance exceeded"
    return report
