"""Feasibility function, sample-average flexibility and related quantities.

``psi(d, theta)`` is the smallest uniform violation ``u`` of the capacity
rows that the recourse flows can achieve while every node balances.  A
realization is feasible when ``psi <= feas_tol``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .lp import LinearProgram, LpStatus, SolverOptions, solve_lp
from .milp import MilpOptions, MixedIntegerProgram, solve_milp
from .model import DesignVector, Network, row_blocks
from .sampling import GaussianSpec, SampleSet

__all__ = [
    "FEAS_TOL",
    "FeasibilityResult",
    "SfEstimate",
    "CenterResult",
    "SolverFailure",
    "psi",
    "psi_values",
    "estimate_sf",
    "mean_infeasibility",
    "mean_infeasibility_lp",
    "feasible_center",
    "feasibility_milp",
    "aggregated_feasibility_milp",
]

FEAS_TOL = 1e-7


class SolverFailure(RuntimeError):
    """An LP behind a flexibility quantity did not reach a usable status."""

    def __init__(self, message, sample=None):
        super().__init__(message if sample is None else f"sample {sample}: {message}")
        self.sample = sample


@dataclass
class FeasibilityResult:
    psi: float
    arc_flows: np.ndarray | None
    supplies: np.ndarray | None
    feasible: bool


@dataclass
class SfEstimate:
    value: float
    K: int
    indicators: np.ndarray  # 1 = feasible realization
    design: DesignVector

    @property
    def infeasible(self) -> np.ndarray:
        """Scenario indicator in the ``y^k`` convention (1 = infeasible)."""
        return 1 - self.indicators


@lru_cache(maxsize=32)
def _psi_template(net: Network) -> LinearProgram:
    blk = row_blocks(net)
    nz = blk.n_z
    # columns: z (free), u (free)
    cap = sp.hstack([blk.Gz, -sp.csr_matrix(np.ones((blk.n_cap, 1)))])
    bal = sp.hstack([blk.E, sp.csr_matrix((blk.n_bal, 1))])
    A = sp.vstack([cap, bal]).tocsr()
    senses = ["L"] * blk.n_cap + ["E"] * blk.n_bal
    c = np.zeros(nz + 1)
    c[-1] = 1.0
    return LinearProgram(c, A, senses, np.zeros(A.shape[0]), -np.inf, np.inf)


def _psi_rhs(net: Network, design: DesignVector, theta: np.ndarray) -> np.ndarray:
    blk = row_blocks(net)
    cap_rhs = blk.h - blk.Gd @ design.flat()
    return np.concatenate([cap_rhs, blk.D @ theta])


def psi(
    net: Network,
    design: DesignVector,
    theta,
    opts: SolverOptions | None = None,
    feas_tol: float = FEAS_TOL,
) -> FeasibilityResult:
    """Evaluate the feasibility function at one realization.

    Returns ``psi = +inf`` when no recourse balances the nodes at all (a
    demand on an isolated node) and ``-inf`` when the network has no
    capacity rows to measure.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != net.n_theta:
        raise ValueError(f"theta has {theta.size} entries, network expects {net.n_theta}")
    if not design.matches(net):
        raise ValueError("design dimensions do not match the network")
    tmpl = _psi_template(net)
    lp = LinearProgram(tmpl.c, tmpl.A, tmpl.senses, _psi_rhs(net, design, theta), tmpl.lb, tmpl.ub)
    sol = solve_lp(lp, opts)
    if sol.status is LpStatus.INFEASIBLE:
        return FeasibilityResult(np.inf, None, None, False)
    if sol.status is LpStatus.UNBOUNDED:
        return FeasibilityResult(-np.inf, None, None, True)
    if not sol.optimal:
        raise SolverFailure(f"feasibility LP ended with status {sol.status.value}")
    nA = net.n_arcs
    value = float(sol.objective)
    return FeasibilityResult(value, sol.x[:nA], sol.x[nA:-1], value <= feas_tol)


def psi_values(net, design, samples: SampleSet, opts=None) -> np.ndarray:
    """``psi`` for every row of a sample set, one independent LP per row."""
    if samples.dim != net.n_theta:
        raise ValueError(f"samples have dimension {samples.dim}, network expects {net.n_theta}")
    out = np.empty(samples.K)
    for k, theta in enumerate(samples.samples):
        try:
            out[k] = psi(net, design, theta, opts).psi
        except SolverFailure as exc:
            raise SolverFailure(str(exc), sample=k) from exc
    return out


def estimate_sf(net, design, samples: SampleSet, opts=None, feas_tol: float = FEAS_TOL) -> SfEstimate:
    """Fraction of realizations with ``psi <= feas_tol``."""
    values = psi_values(net, design, samples, opts)
    ind = (values <= feas_tol).astype(int)
    return SfEstimate(ind.sum() / samples.K, samples.K, ind, design)


def mean_infeasibility(net, design, samples: SampleSet, opts=None) -> float:
    """``mean(max(psi_k, 0))`` over the sample set."""
    values = psi_values(net, design, samples, opts)
    return float(np.mean(np.maximum(values, 0.0)))


def mean_infeasibility_lp(net: Network, design: DesignVector, samples: SampleSet) -> LinearProgram:
    """Aggregated LP whose optimum is the mean infeasibility.

    Columns are ``[z^1, u^1, ..., z^K, u^K]`` with ``u^k >= 0`` bounding every
    capacity row of its realization.
    """
    blk = row_blocks(net)
    K = samples.K
    block = _psi_template(net).A
    A = sp.block_diag([block] * K, format="csr")
    rhs = np.concatenate([_psi_rhs(net, design, th) for th in samples.samples])
    senses = np.tile(_psi_template(net).senses, K)
    nz = blk.n_z
    c = np.zeros(K * (nz + 1))
    lb = np.full(c.size, -np.inf)
    c[nz :: nz + 1] = 1.0 / K
    lb[nz :: nz + 1] = 0.0
    return LinearProgram(c, A, senses, rhs, lb, np.inf)


@dataclass
class CenterResult:
    theta: np.ndarray
    psi: float
    boxed: bool  # True when the safeguard box on theta was needed


def feasible_center(
    net: Network,
    design: DesignVector | None = None,
    theta_bounds: tuple | None = None,
    spec: GaussianSpec | None = None,
    opts: SolverOptions | None = None,
) -> CenterResult:
    """Realization that minimizes ``psi`` over theta.

    ``theta_bounds`` (lower, upper arrays) restricts theta from the start.
    If the unrestricted problem is unbounded, it is re-solved on the box
    ``mean +- 10*sqrt(diag(cov))`` of ``spec`` (or ``+-1e6`` without one).
    A network without capacity rows stays unbounded; the result then has
    ``psi = -inf`` and ``boxed = True``.
    """
    design = design if design is not None else DesignVector.zeros(net)
    blk = row_blocks(net)
    nz, nt = blk.n_z, net.n_theta
    # columns: z, u, theta
    cap = sp.hstack([blk.Gz, -sp.csr_matrix(np.ones((blk.n_cap, 1))), sp.csr_matrix((blk.n_cap, nt))])
    bal = sp.hstack([blk.E, sp.csr_matrix((blk.n_bal, 1)), -blk.D])
    A = sp.vstack([cap, bal]).tocsr()
    senses = ["L"] * blk.n_cap + ["E"] * blk.n_bal
    b = np.concatenate([blk.h - blk.Gd @ design.flat(), np.zeros(blk.n_bal)])
    c = np.zeros(nz + 1 + nt)
    c[nz] = 1.0
    lb = np.full(c.size, -np.inf)
    ub = np.full(c.size, np.inf)

    def run(lo, hi):
        lb[nz + 1 :], ub[nz + 1 :] = lo, hi
        return solve_lp(LinearProgram(c, A, senses, b, lb, ub), opts)

    boxed = theta_bounds is not None
    if boxed:
        sol = run(*theta_bounds)
    else:
        sol = run(-np.inf, np.inf)
        if sol.status is LpStatus.UNBOUNDED:
            boxed = True
            if spec is not None:
                half = 10.0 * np.sqrt(np.diag(spec.covariance))
                sol = run(spec.mean - half, spec.mean + half)
            else:
                sol = run(-1e6, 1e6)
    if sol.status is LpStatus.INFEASIBLE:
        raise SolverFailure("feasible-center LP is infeasible")
    if sol.status is LpStatus.UNBOUNDED:
        # no capacity rows bound u; report the flag rather than fail
        theta = spec.mean.copy() if spec is not None else np.zeros(nt)
        return CenterResult(theta, -np.inf, True)
    if not sol.optimal:
        raise SolverFailure(f"feasible-center LP ended with status {sol.status.value}")
    return CenterResult(sol.x[nz + 1 :].copy(), float(sol.x[nz]), boxed)


def feasibility_milp(net: Network, design: DesignVector, theta, U: float = 1e4) -> MixedIntegerProgram:
    """Single-realization binary test ``min y*U`` with every row relaxed by ``y*U``."""
    return aggregated_feasibility_milp(net, design, SampleSet.from_values(np.atleast_2d(theta)), U, normalize=False)


def aggregated_feasibility_milp(
    net: Network, design: DesignVector, samples: SampleSet, U: float = 1e4, normalize: bool = True
) -> MixedIntegerProgram:
    """All realizations at a fixed design: ``min (1/K) sum_k y^k U``.

    Columns are ``[z^1, y^1, ..., z^K, y^K]``.  With ``normalize=False`` the
    ``1/K`` factor is dropped.
    """
    if U <= 0:
        raise ValueError("U must be positive")
    blk = row_blocks(net)
    K = samples.K
    nz = blk.n_z
    cap = sp.hstack([blk.Gz, -U * sp.csr_matrix(np.ones((blk.n_cap, 1)))])
    bal = sp.hstack([blk.E, sp.csr_matrix((blk.n_bal, 1))])
    block = sp.vstack([cap, bal]).tocsr()
    A = sp.block_diag([block] * K, format="csr")
    rhs = np.concatenate([_psi_rhs(net, design, th) for th in samples.samples])
    senses = np.tile(["L"] * blk.n_cap + ["E"] * blk.n_bal, K)
    width = nz + 1
    c = np.zeros(K * width)
    c[nz::width] = U / K if normalize else U
    lb = np.full(c.size, -np.inf)
    ub = np.full(c.size, np.inf)
    lb[nz::width] = 0.0
    ub[nz::width] = 1.0
    return MixedIntegerProgram(LinearProgram(c, A, senses, rhs, lb, ub), np.arange(nz, K * width, width))


def solve_feasibility_milp(mip: MixedIntegerProgram, opts: MilpOptions | None = None):
    return solve_milp(mip, opts or MilpOptions())
