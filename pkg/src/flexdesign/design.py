"""Epsilon-constrained capacity design over a Monte Carlo sample set.

Every realization ``k`` gets its own recourse ``z^k = [a^k, s^k]`` and a
scenario indicator ``y^k`` that relaxes all of its capacity rows by
``y^k * U``.  The flexibility objective is ``(1/K) * sum(1 - y^k)``.

Two solution routes are offered for the cost-capped problem:

* :func:`solve_design_mip` treats ``y`` as binary (branch-and-bound);
* :func:`solve_design_continuous` relaxes ``y`` to ``[0, 1]``, rounds every
  strictly positive ``y`` up to 1, and re-solves with ``y`` fixed to recover
  a design that realizes the rounded indicator.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .flexibility import FEAS_TOL, psi_values
from .lp import LinearProgram, LpStatus, SolverOptions, solve_lp
from .milp import MilpOptions, MilpStatus, MixedIntegerProgram, solve_milp
from .model import CostSpec, DesignVector, Network, cost, row_blocks
from .sampling import SampleSet

__all__ = [
    "DEFAULT_U",
    "ROUND_TOL",
    "Mode",
    "Direction",
    "ScenarioProgram",
    "ParetoPoint",
    "ComparisonRow",
    "ComparisonReport",
    "Screen",
    "build_scenario_program",
    "screen_scenarios",
    "solve_design_mip",
    "solve_design_continuous",
    "solve_design_min_cost",
    "pareto_sweep",
    "compare_fronts",
    "enumerate_design_optimum",
    "DesignError",
    "GridMismatch",
]

log = logging.getLogger(__name__)

DEFAULT_U = 10000.0
ROUND_TOL = 1e-6


class Mode(str, Enum):
    MIP = "mip"
    CONTINUOUS = "cont"


class Direction(str, Enum):
    MAX_SF = "max-sf"
    MIN_COST = "min-cost"


class DesignError(RuntimeError):
    pass


class GridMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScenarioProgram:
    """Assembled scenario program plus its column map.

    Columns: ``d`` (``[suppliers, arcs]``), then per realization ``k`` the
    block ``[a^k, s^k, y^k]``.  Rows: per realization the capacity rows then
    the node balances, and one final cost (or flexibility-floor) row.
    """

    net: Network
    samples: SampleSet
    mode: Mode
    direction: Direction
    eps: float
    U: float
    cost_spec: CostSpec
    lp: LinearProgram

    @property
    def K(self) -> int:
        return self.samples.K

    @property
    def n_design(self) -> int:
        return self.net.n_design

    @property
    def block_width(self) -> int:
        return self.net.n_arcs + self.net.n_suppliers + 1

    @property
    def y_cols(self) -> np.ndarray:
        w = self.block_width
        return self.n_design + np.arange(self.K) * w + (w - 1)

    def z_cols(self, k: int) -> np.ndarray:
        start = self.n_design + k * self.block_width
        return np.arange(start, start + self.block_width - 1)

    @property
    def mip(self) -> MixedIntegerProgram:
        """The program with ``y`` declared binary (whatever the mode)."""
        return MixedIntegerProgram(self.lp, self.y_cols)

    @property
    def n_vars(self) -> int:
        return self.lp.n_vars

    @property
    def n_rows(self) -> int:
        return self.lp.n_rows

    @property
    def n_binary(self) -> int:
        return self.K if self.mode is Mode.MIP else 0

    def design_of(self, x) -> DesignVector:
        return DesignVector.from_flat(self.net, np.asarray(x)[: self.n_design], clip=1e-7)

    def with_y_fixed(self, y) -> LinearProgram:
        lb = self.lp.lb.copy()
        ub = self.lp.ub.copy()
        lb[self.y_cols] = y
        ub[self.y_cols] = y
        return self.lp.with_bounds(lb, ub)


def build_scenario_program(
    net: Network,
    samples: SampleSet,
    mode: Mode | str = Mode.MIP,
    direction: Direction | str = Direction.MAX_SF,
    eps: float = 0.0,
    U: float = DEFAULT_U,
    cost_spec: CostSpec | None = None,
) -> ScenarioProgram:
    """Assemble the scenario program for one epsilon value.

    ``direction="max-sf"`` caps the design cost at ``eps``;
    ``direction="min-cost"`` requires ``(1/K) * sum(1 - y) >= eps``.
    """
    mode, direction = Mode(mode), Direction(direction)
    if U <= 0:
        raise ValueError("U must be positive")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if direction is Direction.MIN_COST and eps > 1:
        raise ValueError("a flexibility floor must lie in [0, 1]")
    if samples.dim != net.n_theta:
        raise ValueError(f"samples have dimension {samples.dim}, network expects {net.n_theta}")
    cost_spec = cost_spec or CostSpec.for_network(net)
    if cost_spec.n_design != net.n_design:
        raise ValueError("cost spec does not match the network")

    blk = row_blocks(net)
    K, nd, nz = samples.K, net.n_design, blk.n_z
    ones = sp.csr_matrix(np.ones((blk.n_cap, 1)))
    block = sp.vstack([
        sp.hstack([blk.Gz, -U * ones]),
        sp.hstack([blk.E, sp.csr_matrix((blk.n_bal, 1))]),
    ])
    d_block = sp.vstack([blk.Gd, sp.csr_matrix((blk.n_bal, nd))])
    body = sp.hstack([
        sp.kron(np.ones((K, 1)), d_block),
        sp.kron(sp.identity(K), block),
    ])
    width = nz + 1
    y_cols = nd + np.arange(K) * width + nz
    n = nd + K * width
    last = np.zeros(n)
    if direction is Direction.MAX_SF:
        last[:nd] = cost_spec.weights
        last_rhs, last_sense = eps, "L"
    else:
        last[y_cols] = 1.0 / K
        last_rhs, last_sense = 1.0 - eps, "L"
    A = sp.vstack([body, sp.csr_matrix(last)]).tocsr()

    rhs_theta = net.nodal_demand(samples.samples)  # K x n_nodes
    rhs = np.hstack([np.tile(blk.h, (K, 1)), rhs_theta]).reshape(-1)
    b = np.concatenate([rhs, [last_rhs]])
    senses = np.concatenate([
        np.tile(np.array(["L"] * blk.n_cap + ["E"] * blk.n_bal), K), [last_sense],
    ])
    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    lb[:nd] = 0.0
    lb[y_cols] = 0.0
    ub[y_cols] = 1.0
    c = np.zeros(n)
    if direction is Direction.MAX_SF:
        c[y_cols] = -1.0 / K
        lp = LinearProgram(c, A, senses, b, lb, ub, maximize=True, offset=1.0)
    else:
        c[:nd] = cost_spec.weights
        lp = LinearProgram(c, A, senses, b, lb, ub)
    return ScenarioProgram(net, samples, mode, direction, float(eps), float(U), cost_spec, lp)


@dataclass
class ParetoPoint:
    eps: float
    cost: float
    sf: float
    design: DesignVector | None
    y: np.ndarray | None  # 1 = realization dropped (infeasible)
    time: float
    mode: Mode
    optimal: bool
    status: str = "ok"
    details: dict = field(default_factory=dict)

    @property
    def K(self) -> int:
        return 0 if self.y is None else self.y.size


# ----------------------------------------------------------------- screening


@dataclass
class Screen:
    """Per-realization facts that do not depend on the budget.

    ``psi0``: feasibility function at the zero design.  ``min_cost``: cheapest
    design cost making the realization feasible on its own (``inf`` when no
    expansion can).  Capacity expansion never shrinks the feasible set, so a
    realization with ``psi0 <= tol`` stays feasible for every design and one
    with ``min_cost > eps`` is infeasible for every design within budget.
    """

    psi0: np.ndarray
    min_cost: np.ndarray
    time: float

    @property
    def free_feasible(self) -> np.ndarray:
        return self.psi0 <= FEAS_TOL


def _min_cost_lp(net: Network, theta: np.ndarray, cost_spec: CostSpec) -> LinearProgram:
    blk = row_blocks(net)
    nd, nz = net.n_design, blk.n_z
    A = sp.vstack([
        sp.hstack([blk.Gd, blk.Gz]),
        sp.hstack([sp.csr_matrix((blk.n_bal, nd)), blk.E]),
    ]).tocsr()
    senses = ["L"] * blk.n_cap + ["E"] * blk.n_bal
    b = np.concatenate([blk.h, blk.D @ theta])
    c = np.concatenate([cost_spec.weights, np.zeros(nz)])
    lb = np.concatenate([np.zeros(nd), np.full(nz, -np.inf)])
    return LinearProgram(c, A, senses, b, lb, np.inf)


def screen_scenarios(net, samples: SampleSet, cost_spec: CostSpec | None = None, opts=None) -> Screen:
    t0 = time.perf_counter()
    cost_spec = cost_spec or CostSpec.for_network(net)
    psi0 = psi_values(net, DesignVector.zeros(net), samples, opts)
    min_cost = np.zeros(samples.K)
    for k in np.flatnonzero(psi0 > FEAS_TOL):
        sol = solve_lp(_min_cost_lp(net, samples.samples[k], cost_spec), opts)
        if sol.status is LpStatus.INFEASIBLE:
            min_cost[k] = np.inf
        elif sol.optimal:
            min_cost[k] = max(sol.objective, 0.0)
        else:
            raise DesignError(f"sample {k}: min-cost LP ended with status {sol.status.value}")
    return Screen(psi0, min_cost, time.perf_counter() - t0)


# --------------------------------------------------------------- MIP route


def _subset(samples: SampleSet, idx) -> SampleSet:
    return SampleSet(samples.samples[np.asarray(idx, dtype=int)], samples.seed, samples.tag)


def _sf_of(y) -> float:
    """Served fraction from the violation indicators, counted exactly."""
    y = np.asarray(y)
    return float((y.size - np.count_nonzero(y)) / y.size)


def _milp_opts(time_limit, K, probing="fractional") -> MilpOptions:
    return MilpOptions(time_limit=time_limit, objective_step=1.0 / K, probing=probing)


def solve_design_mip(
    prog: ScenarioProgram,
    time_limit: float | None = None,
    screen: Screen | bool = False,
    milp_options: MilpOptions | None = None,
) -> ParetoPoint:
    """Maximize the sample flexibility under the cost cap with binary ``y``.

    By default branch-and-bound runs on the full program.  With ``screen``
    (``True`` or a precomputed :class:`Screen`) realizations feasible at the
    zero design are fixed to ``y = 0`` and those no design within budget can
    repair are fixed to ``y = 1`` first, so the search only sees the rest.
    Both fixings keep an optimal solution; screening uses the monotonicity of
    the network in ``d`` and is much faster on large sample sets.
    """
    if prog.direction is not Direction.MAX_SF:
        raise ValueError("solve_design_mip expects a cost-capped (max-sf) program")
    t0 = time.perf_counter()
    net, samples, K, eps, U = prog.net, prog.samples, prog.K, prog.eps, prog.U
    if screen is False:
        opts = milp_options or _milp_opts(time_limit, K)
        sol = solve_milp(prog.mip, opts)
        return _point_from_milp(prog, sol, time.perf_counter() - t0)

    scr = screen if isinstance(screen, Screen) else screen_scenarios(net, samples, prog.cost_spec)
    tol = 1e-9 * max(1.0, eps)
    fixed0 = scr.free_feasible
    # y = 1 must still leave the relaxed rows satisfiable: psi <= U at d = 0
    dropped = (~fixed0) & (scr.min_cost > eps + tol) & (scr.psi0 <= U)
    contested = np.flatnonzero(~fixed0 & ~dropped)
    y = np.where(fixed0, 0.0, 1.0)
    details = {"fixed_feasible": int(fixed0.sum()), "fixed_infeasible": int(dropped.sum()),
               "contested": int(contested.size), "nodes": 0}
    if contested.size == 0:
        d = DesignVector.zeros(net)
        sf = _sf_of(y)
        return ParetoPoint(eps, 0.0, sf, d, y.astype(np.int8), time.perf_counter() - t0,
                           Mode.MIP, True, details=details)

    sub = build_scenario_program(net, _subset(samples, contested), Mode.MIP, Direction.MAX_SF,
                                 eps, U, prog.cost_spec)
    remaining = None if time_limit is None else max(time_limit - (time.perf_counter() - t0), 1e-3)
    opts = milp_options or _milp_opts(remaining, sub.K)
    sol = solve_milp(sub.mip, opts)
    details["nodes"] = sol.nodes
    details["lp_solves"] = sol.lp_solves
    details["milp_status"] = sol.status.value
    elapsed = time.perf_counter() - t0
    if not sol.has_incumbent:
        return ParetoPoint(eps, float("nan"), float("nan"), None, None, elapsed, Mode.MIP, False,
                           status=sol.status.value, details=details)
    y[contested] = np.round(sol.x[sub.y_cols])
    d = sub.design_of(sol.x)
    return ParetoPoint(eps, cost(d, prog.cost_spec), _sf_of(y), d, y.astype(np.int8), elapsed,
                       Mode.MIP, sol.optimal, status=sol.status.value, details=details)


def _point_from_milp(prog: ScenarioProgram, sol, elapsed) -> ParetoPoint:
    details = {"nodes": sol.nodes, "lp_solves": sol.lp_solves, "milp_status": sol.status.value}
    if not sol.has_incumbent:
        return ParetoPoint(prog.eps, float("nan"), float("nan"), None, None, elapsed, Mode.MIP,
                           False, status=sol.status.value, details=details)
    y = np.round(sol.x[prog.y_cols]).astype(np.int8)
    d = prog.design_of(sol.x)
    sf = _sf_of(y)
    return ParetoPoint(prog.eps, cost(d, prog.cost_spec), sf, d, y, elapsed, Mode.MIP,
                       sol.optimal, status=sol.status.value, details=details)


# -------------------------------------------------------- continuous route


def _round_up(y_frac: np.ndarray, round_tol: float) -> np.ndarray:
    return np.where(y_frac <= round_tol, 0.0, 1.0)


def _fix_and_repair(prog: ScenarioProgram, y_frac, y_round, lp_opts):
    """Re-solve with ``y`` fixed; flip the largest rounded-down ``y`` on failure."""
    y_round = y_round.copy()
    flips = 0
    order = [k for k in np.argsort(-y_frac, kind="stable") if y_round[k] == 0 and y_frac[k] > 0]
    while True:
        sol = solve_lp(prog.with_y_fixed(y_round), lp_opts)
        if sol.optimal:
            return sol, y_round, flips
        if sol.status is not LpStatus.INFEASIBLE:
            raise DesignError(f"fixed-indicator LP ended with status {sol.status.value}")
        if flips >= len(order):
            return sol, y_round, flips
        y_round[order[flips]] = 1.0
        flips += 1


def solve_design_continuous(
    prog: ScenarioProgram,
    round_tol: float = ROUND_TOL,
    lp_opts: SolverOptions | None = None,
) -> tuple[ParetoPoint, np.ndarray]:
    """Relax, round and fix.

    Returns the Pareto point (its ``sf`` is the rounded estimate) and the
    fractional ``y`` of the relaxation.
    """
    if prog.direction is not Direction.MAX_SF:
        raise ValueError("solve_design_continuous expects a cost-capped (max-sf) program")
    t0 = time.perf_counter()
    relax = solve_lp(prog.lp, lp_opts)
    if not relax.optimal:
        raise DesignError(f"relaxation ended with status {relax.status.value}")
    y_frac = np.clip(relax.x[prog.y_cols], 0.0, 1.0)
    y_round = _round_up(y_frac, round_tol)
    fixed, y_round, flips = _fix_and_repair(prog, y_frac, y_round, lp_opts)
    elapsed = time.perf_counter() - t0
    details = {"relaxation": relax.objective, "flips": flips, "relax_time": relax.wall_time}
    if not fixed.optimal:
        return ParetoPoint(prog.eps, float("nan"), float("nan"), None, None, elapsed,
                           Mode.CONTINUOUS, False, status="repair-failed", details=details), y_frac
    d = prog.design_of(fixed.x)
    y = y_round.astype(np.int8)
    point = ParetoPoint(prog.eps, cost(d, prog.cost_spec), _sf_of(y), d, y, elapsed,
                        Mode.CONTINUOUS, True, status="repaired" if flips else "ok", details=details)
    return point, y_frac


# ----------------------------------------------------------- min-cost route


def solve_design_min_cost(
    prog: ScenarioProgram,
    time_limit: float | None = None,
    round_tol: float = ROUND_TOL,
    screen: bool = False,
) -> ParetoPoint:
    """Cheapest design whose scenario indicator meets the flexibility floor.

    Mixed-integer mode returns the optimum (``status="infeasible"`` when the
    floor exceeds what any design attains).  Continuous mode relaxes, rounds
    and re-solves for the cheapest design with ``y`` fixed; its realized
    flexibility may fall short of the floor, which ``details["floor_met"]``
    reports.
    """
    if prog.direction is not Direction.MIN_COST:
        raise ValueError("solve_design_min_cost expects a min-cost program")
    t0 = time.perf_counter()
    net, samples, K, floor, U = prog.net, prog.samples, prog.K, prog.eps, prog.U
    need = math.ceil(floor * K - 1e-9)  # realizations that must be feasible

    if prog.mode is Mode.CONTINUOUS:
        relax = solve_lp(prog.lp)
        if relax.status is LpStatus.INFEASIBLE:
            return ParetoPoint(floor, float("nan"), float("nan"), None, None,
                               time.perf_counter() - t0, Mode.CONTINUOUS, False, status="infeasible")
        y_frac = np.clip(relax.x[prog.y_cols], 0.0, 1.0)
        y_round = _round_up(y_frac, round_tol)
        # cheapest design for the rounded indicator: drop the floor row
        fixed_prog = prog.with_y_fixed(y_round)
        lp = _without_last_row(fixed_prog)
        sol = solve_lp(lp)
        flips = 0
        order = [k for k in np.argsort(-y_frac, kind="stable") if y_round[k] == 0 and y_frac[k] > 0]
        while sol.status is LpStatus.INFEASIBLE and flips < len(order):
            y_round[order[flips]] = 1.0
            flips += 1
            sol = solve_lp(_without_last_row(prog.with_y_fixed(y_round)))
        elapsed = time.perf_counter() - t0
        if not sol.optimal:
            return ParetoPoint(floor, float("nan"), float("nan"), None, None, elapsed,
                               Mode.CONTINUOUS, False, status="repair-failed")
        d = prog.design_of(sol.x)
        y = y_round.astype(np.int8)
        sf = _sf_of(y)
        return ParetoPoint(floor, cost(d, prog.cost_spec), sf, d, y, elapsed, Mode.CONTINUOUS, True,
                           details={"floor_met": bool(K - y.sum() >= need), "flips": flips})

    if not screen:
        sol = solve_milp(prog.mip, MilpOptions(time_limit=time_limit, probing="fractional"))
        return _min_cost_point(prog, sol, None, time.perf_counter() - t0)

    scr = screen_scenarios(net, samples, prog.cost_spec)
    fixed0 = scr.free_feasible
    dropped = ~fixed0 & ~np.isfinite(scr.min_cost) & (scr.psi0 <= U)
    contested = np.flatnonzero(~fixed0 & ~dropped)
    y = np.where(fixed0, 0.0, 1.0)
    still = need - int(fixed0.sum())
    elapsed = lambda: time.perf_counter() - t0  # noqa: E731
    if still <= 0:
        d = DesignVector.zeros(net)
        return ParetoPoint(floor, 0.0, _sf_of(y), d, y.astype(np.int8), elapsed(), Mode.MIP, True)
    if still > contested.size:
        return ParetoPoint(floor, float("nan"), float("nan"), None, None, elapsed(), Mode.MIP, True,
                           status="infeasible")
    sub = build_scenario_program(net, _subset(samples, contested), Mode.MIP, Direction.MIN_COST,
                                 still / contested.size, U, prog.cost_spec)
    sol = solve_milp(sub.mip, MilpOptions(time_limit=time_limit, probing="fractional"))
    if sol.has_incumbent:
        y[contested] = np.round(sol.x[sub.y_cols])
    return _min_cost_point(sub, sol, y, elapsed(), eps=floor)


def _without_last_row(lp: LinearProgram) -> LinearProgram:
    m = lp.n_rows - 1
    return LinearProgram(lp.c, lp.A[:m], lp.senses[:m], lp.b[:m], lp.lb, lp.ub, lp.maximize, lp.offset)


def _min_cost_point(prog, sol, y_full, elapsed, eps=None) -> ParetoPoint:
    eps = prog.eps if eps is None else eps
    if sol.status is MilpStatus.INFEASIBLE:
        return ParetoPoint(eps, float("nan"), float("nan"), None, None, elapsed, Mode.MIP, True,
                           status="infeasible")
    if not sol.has_incumbent:
        return ParetoPoint(eps, float("nan"), float("nan"), None, None, elapsed, Mode.MIP, False,
                           status=sol.status.value)
    d = prog.design_of(sol.x)
    y = np.round(sol.x[prog.y_cols]) if y_full is None else y_full
    y = np.asarray(y).astype(np.int8)
    return ParetoPoint(eps, cost(d, prog.cost_spec), _sf_of(y), d, y, elapsed, Mode.MIP,
                       sol.optimal, status=sol.status.value)


# ---------------------------------------------------------------- sweeping


def pareto_sweep(
    net: Network,
    samples: SampleSet,
    grid: Sequence[float],
    mode: Mode | str = Mode.MIP,
    U: float = DEFAULT_U,
    time_limit: float | None = None,
    cost_spec: CostSpec | None = None,
    round_tol: float = ROUND_TOL,
    screen: bool = False,
) -> list[ParetoPoint]:
    """One independently solved point per budget in ``grid``.

    ``screen`` applies to the MIP route; the screen is computed once and its
    time is charged to the first point.  A point that fails is recorded with
    ``status`` describing the failure and the sweep moves on.
    """
    grid = [float(g) for g in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("epsilon grid must be strictly increasing")
    mode = Mode(mode)
    cost_spec = cost_spec or CostSpec.for_network(net)
    scr = None
    if mode is Mode.MIP and screen:
        scr = screen_scenarios(net, samples, cost_spec)
    points = []
    for i, eps in enumerate(grid):
        try:
            prog = build_scenario_program(net, samples, mode, Direction.MAX_SF, eps, U, cost_spec)
            if mode is Mode.MIP:
                pt = solve_design_mip(prog, time_limit=time_limit, screen=scr if screen else False)
                if scr is not None and i == 0:
                    pt.time += scr.time  # screening is shared by the whole sweep
            else:
                pt, _ = solve_design_continuous(prog, round_tol)
        except Exception as exc:  # keep sweeping, record the failure
            log.warning("eps=%g failed: %s", eps, exc)
            pt = ParetoPoint(eps, float("nan"), float("nan"), None, None, 0.0, mode, False,
                             status=f"error: {exc}")
        points.append(pt)
    return points


@dataclass
class ComparisonRow:
    eps: float
    cost: float
    sf_mip: float
    sf_cont: float
    sf_gap: float
    y_diff_pct: float
    time_mip: float
    time_cont: float
    mip_optimal: bool
    violation: bool  # continuous point beats a proven MIP optimum


@dataclass
class ComparisonReport:
    rows: list[ComparisonRow]

    @property
    def violations(self) -> list[ComparisonRow]:
        return [r for r in self.rows if r.violation]

    @property
    def mean_y_diff_pct(self) -> float:
        return float(np.mean([r.y_diff_pct for r in self.rows])) if self.rows else 0.0

    @property
    def time_ratio(self) -> float:
        tm = sum(r.time_mip for r in self.rows)
        tc = sum(r.time_cont for r in self.rows)
        return tc / tm if tm > 0 else float("inf")


def compare_fronts(mip_points: Sequence[ParetoPoint], cont_points: Sequence[ParetoPoint]) -> ComparisonReport:
    if len(mip_points) != len(cont_points) or any(
        not math.isclose(a.eps, b.eps, rel_tol=0, abs_tol=1e-12) for a, b in zip(mip_points, cont_points)
    ):
        raise GridMismatch("MIP and continuous sweeps use different epsilon grids")
    rows = []
    for m, c in zip(mip_points, cont_points):
        if m.y is not None and c.y is not None:
            if m.y.size != c.y.size:
                raise GridMismatch("indicator vectors have different lengths")
            diff = 100.0 * np.count_nonzero(m.y != c.y) / m.y.size
            gran = 1.0 / m.y.size
        else:
            diff, gran = float("nan"), 0.0
        gap = m.sf - c.sf
        violation = bool(m.optimal and np.isfinite(gap) and gap < -gran * 1e-6)
        rows.append(ComparisonRow(m.eps, m.cost, m.sf, c.sf, gap, diff, m.time, c.time, m.optimal, violation))
    return ComparisonReport(rows)


# ------------------------------------------------------------------- oracle


def enumerate_design_optimum(prog: ScenarioProgram, lp_opts: SolverOptions | None = None):
    """Brute force over every ``y`` pattern; returns ``(best_sf, best_y)``.

    Each pattern is checked by one LP with ``y`` fixed.  Patterns are visited
    by decreasing number of feasible realizations so the first feasible one
    is optimal.  Intended for ``K`` up to about 12.
    """
    from itertools import combinations

    K = prog.K
    for n_ok in range(K, -1, -1):
        for keep in combinations(range(K), n_ok):
            y = np.ones(K)
            y[list(keep)] = 0.0
            sol = solve_lp(prog.with_y_fixed(y), lp_opts)
            if sol.optimal:
                return n_ok / K, y
    return float("nan"), None
