"""Linear network model: topology, capacity expansions and design cost.

A network carries flows ``a_l`` on arcs with symmetric capacity, injections
``s_b`` from suppliers bounded by ``[0, capacity]`` and uncertain demands
``r_m`` that are drawn from the sampled vector ``theta``.  Every node must
balance::

    sum(a_l received) - sum(a_l sent) + sum(s_b at n) - sum(r_m at n) = 0
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Arc",
    "Supplier",
    "Demand",
    "Network",
    "DesignVector",
    "CostSpec",
    "validate_network",
    "cost",
    "expanded_capacities",
    "RowBlocks",
    "row_blocks",
]


@dataclass(frozen=True)
class Arc:
    id: str
    tail: str
    head: str
    capacity: float


@dataclass(frozen=True)
class Supplier:
    id: str
    node: str
    capacity: float


@dataclass(frozen=True)
class Demand:
    id: str
    node: str
    theta_index: int  # 1-based position in the uncertain vector


@dataclass(frozen=True)
class Network:
    """Immutable network description.

    Flow on arc ``l`` is positive in the tail -> head direction.  Use
    :func:`validate_network` before building any optimization model on it.
    """

    nodes: tuple[str, ...]
    arcs: tuple[Arc, ...] = ()
    suppliers: tuple[Supplier, ...] = ()
    demands: tuple[Demand, ...] = ()
    units: str = "MW"

    def __post_init__(self):
        for name in ("nodes", "arcs", "suppliers", "demands"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    @property
    def n_suppliers(self) -> int:
        return len(self.suppliers)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_theta(self) -> int:
        return len(self.demands)

    @property
    def n_design(self) -> int:
        return self.n_suppliers + self.n_arcs

    @cached_property
    def node_index(self) -> dict[str, int]:
        return {n: i for i, n in enumerate(self.nodes)}

    @cached_property
    def arc_capacity(self) -> np.ndarray:
        return np.array([a.capacity for a in self.arcs], dtype=float)

    @cached_property
    def supplier_capacity(self) -> np.ndarray:
        return np.array([s.capacity for s in self.suppliers], dtype=float)

    @cached_property
    def arc_incidence(self) -> sp.csr_matrix:
        """Node-by-arc matrix: +1 at the receiving node, -1 at the sender."""
        idx = self.node_index
        rows, cols, vals = [], [], []
        for j, a in enumerate(self.arcs):
            rows += [idx[a.head], idx[a.tail]]
            cols += [j, j]
            vals += [1.0, -1.0]
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n_nodes, self.n_arcs))

    @cached_property
    def supplier_incidence(self) -> sp.csr_matrix:
        idx = self.node_index
        rows = [idx[s.node] for s in self.suppliers]
        cols = list(range(self.n_suppliers))
        return sp.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(self.n_nodes, self.n_suppliers)
        )

    @cached_property
    def demand_incidence(self) -> sp.csr_matrix:
        """Node-by-theta matrix mapping the demand vector onto nodes."""
        idx = self.node_index
        rows = [idx[d.node] for d in self.demands]
        cols = [d.theta_index - 1 for d in self.demands]
        return sp.csr_matrix(
            (np.ones(len(rows)), (rows, cols)), shape=(self.n_nodes, self.n_theta)
        )

    def nodal_demand(self, theta: np.ndarray) -> np.ndarray:
        """Aggregate demand per node for one or many realizations (last axis)."""
        theta = np.asarray(theta, dtype=float)
        return (self.demand_incidence @ theta.T).T


def validate_network(net: Network) -> list[str]:
    """Return a list of invariant violations; an empty list means valid."""
    problems = []
    nodes = set(net.nodes)
    if not net.nodes:
        problems.append("network has no nodes")
    if len(nodes) != len(net.nodes):
        problems.append("duplicate node identifiers")

    def _check_cap(kind, ident, cap):
        if not (math.isfinite(cap) and cap >= 0):
            problems.append(f"{kind} {ident!r}: capacity must be finite and >= 0, got {cap}")

    for kind, items in (("arc", net.arcs), ("supplier", net.suppliers), ("demand", net.demands)):
        ids = [it.id for it in items]
        if len(set(ids)) != len(ids):
            problems.append(f"duplicate {kind} identifiers")

    for a in net.arcs:
        missing = [n for n in (a.tail, a.head) if n not in nodes]
        if missing:
            problems.append(f"arc {a.id!r} references unknown node(s) {', '.join(map(repr, missing))}")
        _check_cap("arc", a.id, a.capacity)
    for s in net.suppliers:
        if s.node not in nodes:
            problems.append(f"supplier {s.id!r} references unknown node {s.node!r}")
        _check_cap("supplier", s.id, s.capacity)

    if not net.demands:
        problems.append("network has no demands")
    for d in net.demands:
        if d.node not in nodes:
            problems.append(f"demand {d.id!r} references unknown node {d.node!r}")
    indices = sorted(d.theta_index for d in net.demands)
    if indices and indices != list(range(1, len(indices) + 1)):
        problems.append("θ-index not bijective onto 1..n_theta")
    return problems


@dataclass(frozen=True, eq=False)
class DesignVector:
    """Nonnegative capacity expansions for suppliers and arcs."""

    supplier: np.ndarray
    arc: np.ndarray

    def __post_init__(self):
        s = np.array(self.supplier, dtype=float).reshape(-1)
        a = np.array(self.arc, dtype=float).reshape(-1)
        if np.any(~np.isfinite(s)) or np.any(~np.isfinite(a)):
            raise ValueError("design entries must be finite")
        if np.any(s < 0) or np.any(a < 0):
            raise ValueError("design entries must be nonnegative")
        s.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "supplier", s)
        object.__setattr__(self, "arc", a)

    @classmethod
    def zeros(cls, net: Network) -> "DesignVector":
        return cls(np.zeros(net.n_suppliers), np.zeros(net.n_arcs))

    @classmethod
    def from_flat(cls, net: Network, values: Sequence[float], clip: float = 0.0) -> "DesignVector":
        """Split a flat ``[suppliers..., arcs...]`` vector.

        Entries in ``[-clip, 0)`` are snapped to zero to absorb solver noise.
        """
        v = np.array(values, dtype=float)
        if v.shape != (net.n_design,):
            raise ValueError(f"expected {net.n_design} design entries, got {v.shape}")
        if clip > 0:
            v[(v < 0) & (v >= -clip)] = 0.0
        return cls(v[: net.n_suppliers], v[net.n_suppliers :])

    def flat(self) -> np.ndarray:
        return np.concatenate([self.supplier, self.arc])

    def matches(self, net: Network) -> bool:
        return self.supplier.shape == (net.n_suppliers,) and self.arc.shape == (net.n_arcs,)

    def __eq__(self, other):
        if not isinstance(other, DesignVector):
            return NotImplemented
        return np.array_equal(self.supplier, other.supplier) and np.array_equal(self.arc, other.arc)

    def __repr__(self):
        return f"DesignVector(supplier={self.supplier.tolist()}, arc={self.arc.tolist()})"


@dataclass(frozen=True, eq=False)
class CostSpec:
    """Linear design cost ``sum(w_i * d_i)`` over ``[suppliers..., arcs...]``.

    Without explicit weights every variable costs ``1/sqrt(n_design)``.
    """

    n_design: int
    weights: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.n_design < 1:
            raise ValueError("cost needs at least one design variable")
        if self.weights is None:
            w = np.full(self.n_design, 1.0 / math.sqrt(self.n_design))
        else:
            w = np.array(self.weights, dtype=float).reshape(-1)
            if w.shape != (self.n_design,):
                raise ValueError(f"expected {self.n_design} cost weights, got {w.size}")
            if np.any(w < 0) or np.any(~np.isfinite(w)):
                raise ValueError("cost weights must be finite and >= 0")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def for_network(cls, net: Network, weights=None) -> "CostSpec":
        return cls(net.n_design, weights)

    @property
    def is_default(self) -> bool:
        return bool(np.all(self.weights == 1.0 / math.sqrt(self.n_design)))


def cost(design: DesignVector, spec: CostSpec) -> float:
    flat = design.flat()
    if flat.size != spec.n_design:
        raise ValueError(f"design has {flat.size} entries, cost spec expects {spec.n_design}")
    return float(spec.weights @ flat)


def expanded_capacities(net: Network, design: DesignVector) -> tuple[np.ndarray, np.ndarray]:
    """Effective ``(arc_bound, supplier_upper)``.

    Arc flows live in ``[-arc_bound, arc_bound]``, supplier injections in
    ``[0, supplier_upper]``.
    """
    if not design.matches(net):
        raise ValueError("design dimensions do not match the network")
    return net.arc_capacity + design.arc, net.supplier_capacity + design.supplier


class RowBlocks(NamedTuple):
    """Per-realization constraint data on recourse ``z = [a, s]``.

    Capacity rows read ``Gz @ z + Gd @ d - h <= slack`` (arc lower, arc
    upper, supplier lower, supplier upper); balances read ``E @ z = D @ theta``.
    """

    Gz: sp.csr_matrix
    Gd: sp.csr_matrix
    h: np.ndarray
    E: sp.csr_matrix
    D: sp.csr_matrix

    @property
    def n_cap(self) -> int:
        return self.Gz.shape[0]

    @property
    def n_bal(self) -> int:
        return self.E.shape[0]

    @property
    def n_z(self) -> int:
        return self.Gz.shape[1]


def row_blocks(net: Network) -> RowBlocks:
    nA, nS = net.n_arcs, net.n_suppliers
    IA = sp.identity(nA, format="csr")
    IS = sp.identity(nS, format="csr")
    ZA_S = sp.csr_matrix((nA, nS))
    ZS_A = sp.csr_matrix((nS, nA))
    Gz = sp.vstack([
        sp.hstack([-IA, ZA_S]),
        sp.hstack([IA, ZA_S]),
        sp.hstack([ZS_A, -IS]),
        sp.hstack([ZS_A, IS]),
    ]).tocsr()
    # design order is [suppliers, arcs]
    Gd = sp.vstack([
        sp.hstack([ZA_S, -IA]),
        sp.hstack([ZA_S, -IA]),
        sp.csr_matrix((nS, nS + nA)),
        sp.hstack([-IS, ZS_A]),
    ]).tocsr()
    h = np.concatenate([net.arc_capacity, net.arc_capacity, np.zeros(nS), net.supplier_capacity])
    E = sp.hstack([net.arc_incidence, net.supplier_incidence]).tocsr()
    return RowBlocks(Gz, Gd, h, E, net.demand_incidence)
