"""LP-based branch-and-bound for mixed-binary programs.

Best-bound node selection (deeper nodes first among equal bounds), most
fractional branching with ties to the lowest index.  Node relaxations are
solved with :func:`flexdesign.lp.solve_lp`.

Two optional devices make the weak big-U relaxations of scenario programs
tractable without changing the optimum:

``objective_step``
    spacing of the lattice the objective is known to live on (``1/K`` for a
    sample-average flexibility objective).  A node is pruned unless its bound
    beats the incumbent by a full step.
``probing``
    at every node each free binary is tentatively fixed to 0 and to 1; a
    side that is infeasible or cannot beat the incumbent fixes the binary to
    the other value.  ``"fractional"`` restricts this to binaries that are
    fractional in the node relaxation.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .lp import LinearProgram, LpSolution, LpStatus, SolverOptions, solve_lp

__all__ = [
    "MixedIntegerProgram",
    "MilpStatus",
    "MilpSolution",
    "MilpOptions",
    "solve_milp",
    "lp_bound",
]


class MilpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    LIMIT_WITH_INCUMBENT = "time-limit-with-incumbent"
    LIMIT_NO_INCUMBENT = "time-limit-no-incumbent"


@dataclass(frozen=True, eq=False)
class MixedIntegerProgram:
    base: LinearProgram
    binaries: np.ndarray

    def __post_init__(self):
        B = np.unique(np.asarray(self.binaries, dtype=int).reshape(-1))
        if B.size and (B[0] < 0 or B[-1] >= self.base.n_vars):
            raise ValueError("binary index out of range")
        if np.any(self.base.lb[B] < 0) or np.any(self.base.ub[B] > 1):
            raise ValueError("binary variables must have bounds within [0, 1]")
        B.flags.writeable = False
        object.__setattr__(self, "binaries", B)

    @property
    def maximize(self) -> bool:
        return self.base.maximize


@dataclass(frozen=True)
class MilpOptions:
    int_tol: float = 1e-6
    mip_gap_tol: float = 1e-8
    time_limit: float | None = None
    node_limit: int | None = None
    objective_step: float | None = None
    probing: bool | str = False  # False, True or "fractional"
    lp: SolverOptions = field(default_factory=SolverOptions)


@dataclass
class MilpSolution:
    status: MilpStatus
    x: np.ndarray | None = None
    objective: float = float("nan")
    best_bound: float = float("nan")
    gap: float = float("nan")
    nodes: int = 0
    lp_solves: int = 0
    wall_time: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is MilpStatus.OPTIMAL

    @property
    def has_incumbent(self) -> bool:
        return self.x is not None


def lp_bound(mip: MixedIntegerProgram, opts: SolverOptions | None = None) -> LpSolution:
    """Relaxation with every binary allowed anywhere in ``[0, 1]``."""
    lb = mip.base.lb.copy()
    ub = mip.base.ub.copy()
    lb[mip.binaries] = np.maximum(lb[mip.binaries], 0.0)
    ub[mip.binaries] = np.minimum(ub[mip.binaries], 1.0)
    return solve_lp(mip.base.with_bounds(lb, ub), opts)


class _Search:
    def __init__(self, mip: MixedIntegerProgram, opts: MilpOptions, incumbent=None):
        self.mip = mip
        self.opts = opts
        self.sign = -1.0 if mip.maximize else 1.0  # internal minimization
        self.B = mip.binaries
        self.t0 = time.perf_counter()
        self.lp_solves = 0
        self.best_x = None
        self.best_val = np.inf  # minimization sense
        if incumbent is not None:
            self._offer(np.asarray(incumbent, dtype=float), from_user=True)

    # -- helpers
    def elapsed(self):
        return time.perf_counter() - self.t0

    def out_of_time(self):
        tl = self.opts.time_limit
        return tl is not None and self.elapsed() >= tl

    def cutoff(self):
        if not np.isfinite(self.best_val):
            return np.inf
        step = self.opts.objective_step
        if step:
            return self.best_val - step + self.opts.mip_gap_tol
        return self.best_val - self.opts.mip_gap_tol

    def solve(self, lbB, ubB) -> LpSolution:
        lb = self.mip.base.lb.copy()
        ub = self.mip.base.ub.copy()
        lb[self.B] = lbB
        ub[self.B] = ubB
        self.lp_solves += 1
        lp_opts = self.opts.lp
        if self.opts.time_limit is not None:
            remaining = max(self.opts.time_limit - self.elapsed(), 1e-3)
            lp_opts = SolverOptions(
                lp_opts.feas_tol, lp_opts.opt_tol, lp_opts.max_iter,
                lp_opts.degeneracy_threshold, remaining, lp_opts.method,
            )
        return solve_lp(self.mip.base.with_bounds(lb, ub), lp_opts)

    def _offer(self, x, from_user=False):
        """Polish a candidate with binaries rounded and keep it if better."""
        xb = np.round(x[self.B])
        if np.any(np.abs(x[self.B] - xb) > self.opts.int_tol) and not from_user:
            return False
        sol = self.solve(xb, xb)
        if not sol.optimal:
            return False
        val = self.sign * sol.objective
        if val < self.best_val - 1e-12:
            self.best_val = val
            x_clean = sol.x.copy()
            x_clean[self.B] = xb
            self.best_x = x_clean
            return True
        return False

    def heuristics(self, x):
        xb = x[self.B]
        self._offer_pattern(np.round(xb))
        self._offer_pattern(np.where(xb > self.opts.int_tol, 1.0, 0.0))
        if self.best_x is None:
            self._offer_pattern(np.where(xb >= 1.0 - self.opts.int_tol, 1.0, 0.0))

    def _offer_pattern(self, pattern):
        x = np.zeros(self.mip.base.n_vars)
        x[self.B] = pattern
        self._offer(x, from_user=True)

    def probe(self, lbB, ubB, x):
        """Fix binaries whose one side cannot beat the incumbent.

        Returns ``None`` when the node is proven useless.
        """
        lbB = lbB.copy()
        ubB = ubB.copy()
        changed = False
        xb = x[self.B]
        cand = lbB < ubB
        if self.opts.probing == "fractional":
            cand &= np.abs(xb - np.round(xb)) > self.opts.int_tol
        for pos in np.flatnonzero(cand):
            if self.out_of_time():
                break
            dead = []
            for v in (0.0, 1.0):
                if abs(xb[pos] - v) <= self.opts.int_tol:
                    continue  # current relaxation already lives on this side
                lo, hi = lbB.copy(), ubB.copy()
                lo[pos] = hi[pos] = v
                sol = self.solve(lo, hi)
                if not sol.optimal or self.sign * sol.objective >= self.cutoff():
                    dead.append(v)
            if len(dead) == 2:
                return None
            if dead:
                keep = 1.0 - dead[0]
                lbB[pos] = ubB[pos] = keep
                changed = True
        return lbB, ubB, changed


def solve_milp(
    mip: MixedIntegerProgram,
    opts: MilpOptions | None = None,
    incumbent: np.ndarray | None = None,
) -> MilpSolution:
    """Branch-and-bound to ``mip_gap_tol`` (absolute) optimality.

    ``incumbent`` may carry a full solution vector whose binary part is used
    as a warm start; it is re-polished before acceptance.  Limits stop the
    search with the best incumbent and bound found so far.
    """
    opts = opts or MilpOptions()
    search = _Search(mip, opts, incumbent)
    B = mip.binaries
    lb0 = np.maximum(mip.base.lb[B], 0.0)
    ub0 = np.minimum(mip.base.ub[B], 1.0)
    counter = itertools.count()
    heap = [(-np.inf, 0, next(counter), lb0, ub0)]
    nodes = 0
    global_bound = -np.inf
    limited = False
    unbounded = False
    root_done = False

    while heap:
        if search.out_of_time() or (opts.node_limit is not None and nodes >= opts.node_limit):
            limited = True
            break
        bound, negdepth, _, lbB, ubB = heapq.heappop(heap)
        if bound >= search.cutoff():
            continue
        nodes += 1
        sol = search.solve(lbB, ubB)
        if sol.status is LpStatus.UNBOUNDED:
            unbounded = True
            break
        if sol.status is LpStatus.ITERATION_LIMIT or (sol.status is LpStatus.ERROR and search.out_of_time()):
            heapq.heappush(heap, (bound, negdepth, next(counter), lbB, ubB))
            limited = True
            break
        if not sol.optimal:
            continue
        val = search.sign * sol.objective
        if val >= search.cutoff():
            continue
        x = sol.x
        if not root_done:
            root_done = True
            search.heuristics(x)
            if val >= search.cutoff():
                continue
        if opts.probing and B.size:
            probed = search.probe(lbB, ubB, x)
            if probed is None:
                continue
            lbB, ubB, changed = probed
            if changed:
                sol = search.solve(lbB, ubB)
                if not sol.optimal:
                    continue
                val = search.sign * sol.objective
                x = sol.x
                if val >= search.cutoff():
                    continue
        xb = x[B]
        free = lbB < ubB
        frac = np.abs(xb - np.round(xb))
        frac[~free] = 0.0
        if np.all(frac <= opts.int_tol):
            if search._offer(x):
                continue
            # rounding broke feasibility: branch on the largest deviation
            if not np.any(frac > 0):
                continue
            pos = int(np.argmax(frac))
        else:
            score = np.minimum(xb - np.floor(xb), np.ceil(xb) - xb)
            score[~free] = -1.0
            pos = int(np.argmax(score))
        for v in (0.0, 1.0):
            lo, hi = lbB.copy(), ubB.copy()
            lo[pos] = hi[pos] = v
            heapq.heappush(heap, (val, negdepth - 1, next(counter), lo, hi))

    elapsed = search.elapsed()
    if unbounded:
        return MilpSolution(MilpStatus.UNBOUNDED, nodes=nodes, lp_solves=search.lp_solves, wall_time=elapsed)
    open_bounds = [h[0] for h in heap if h[0] < search.cutoff()]
    if limited and open_bounds:
        global_bound = min(open_bounds)
        global_bound = min(global_bound, search.best_val)
    else:
        global_bound = search.best_val
        limited = False
    s = search.sign
    if search.best_x is None:
        status = MilpStatus.LIMIT_NO_INCUMBENT if limited else MilpStatus.INFEASIBLE
        return MilpSolution(
            status, best_bound=s * global_bound if np.isfinite(global_bound) else float("nan"),
            nodes=nodes, lp_solves=search.lp_solves, wall_time=elapsed,
        )
    gap = max(search.best_val - global_bound, 0.0) if np.isfinite(global_bound) else np.inf
    status = MilpStatus.LIMIT_WITH_INCUMBENT if limited else MilpStatus.OPTIMAL
    return MilpSolution(
        status, x=search.best_x, objective=s * search.best_val,
        best_bound=s * global_bound if np.isfinite(global_bound) else float("nan"),
        gap=gap, nodes=nodes, lp_solves=search.lp_solves, wall_time=elapsed,
    )
