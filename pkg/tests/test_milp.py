import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexdesign.lp import LinearProgram, LpStatus, solve_lp
from flexdesign.milp import MilpOptions, MilpStatus, MixedIntegerProgram, lp_bound, solve_milp


def enumerate_milp(mip):
    """Best objective over all binary patterns, each pattern solved as an LP."""
    best = None
    B = mip.binaries
    for bits in itertools.product((0.0, 1.0), repeat=B.size):
        lb, ub = mip.base.lb.copy(), mip.base.ub.copy()
        lb[B] = ub[B] = bits
        sol = solve_lp(mip.base.with_bounds(lb, ub))
        if sol.optimal:
            if best is None or (sol.objective > best if mip.maximize else sol.objective < best):
                best = sol.objective
    return best


def random_mip(rng):
    nb = int(rng.integers(1, 7))
    nc = int(rng.integers(0, 3))
    n = nb + nc
    m = int(rng.integers(1, 5))
    A = np.round(rng.uniform(-3, 3, (m, n)), 1)
    b = np.round(rng.uniform(-1, 4, m), 1)
    senses = rng.choice(["L", "G"], size=m, p=[0.7, 0.3])
    c = np.round(rng.uniform(-3, 3, n), 1)
    lb = np.concatenate([np.zeros(nb), np.full(nc, -2.0)])
    ub = np.concatenate([np.ones(nb), np.full(nc, 3.0)])
    lp = LinearProgram.from_dense(c, A, senses, b, lb, ub, maximize=bool(rng.random() < 0.5))
    return MixedIntegerProgram(lp, np.arange(nb))


def test_fixed_binaries_reduce_to_lp():
    lp = LinearProgram.from_dense([1.0, 2.0], [[1.0, 1.0]], ["G"], [0.5], lb=[1.0, 0.0], ub=[1.0, 5.0])
    mip = MixedIntegerProgram(lp, [0])
    sol = solve_milp(mip)
    assert sol.optimal and sol.nodes == 1
    assert sol.objective == pytest.approx(solve_lp(lp).objective)


def test_big_u_forces_indicator():
    # max 1 - y  s.t.  0.5 <= 10 y
    lp = LinearProgram.from_dense([-1.0], [[10.0]], ["G"], [0.5], lb=0.0, ub=1.0, maximize=True, offset=1.0)
    sol = solve_milp(MixedIntegerProgram(lp, [0]))
    assert sol.optimal
    assert sol.x[0] == 1.0 and sol.objective == pytest.approx(0.0)


def test_knapsack():
    lp = LinearProgram.from_dense([1.0, 1.0], [[1.0, 1.0]], ["L"], [1.0], lb=0.0, ub=1.0, maximize=True)
    sol = solve_milp(MixedIntegerProgram(lp, [0, 1]))
    assert sol.objective == pytest.approx(1.0)
    assert sorted(sol.x.tolist()) == [0.0, 1.0]


def test_lp_bound_examples():
    lp = LinearProgram.from_dense([1.0, 1.0], [[1.0, 1.0]], ["L"], [1.0], lb=0.0, ub=1.0, maximize=True)
    mip = MixedIntegerProgram(lp, [0, 1])
    assert lp_bound(mip).objective == pytest.approx(solve_milp(mip).objective)
    bad = LinearProgram.from_dense([1.0], [[1.0]], ["G"], [2.0], lb=0.0, ub=1.0)
    assert lp_bound(MixedIntegerProgram(bad, [0])).status is LpStatus.INFEASIBLE
    assert solve_milp(MixedIntegerProgram(bad, [0])).status is MilpStatus.INFEASIBLE


def test_fractional_bound_above_integer_optimum():
    lp = LinearProgram.from_dense([1.0, 1.0], [[2.0, 2.0]], ["L"], [3.0], lb=0.0, ub=1.0, maximize=True)
    mip = MixedIntegerProgram(lp, [0, 1])
    assert lp_bound(mip).objective == pytest.approx(1.5)
    assert solve_milp(mip).objective == pytest.approx(1.0)


def test_binary_bounds_checked():
    lp = LinearProgram.from_dense([1.0], [[1.0]], ["L"], [1.0], lb=0.0, ub=2.0)
    with pytest.raises(ValueError):
        MixedIntegerProgram(lp, [0])


def test_node_limit_keeps_incumbent():
    rng = np.random.default_rng(3)
    n = 12
    w = rng.uniform(1, 10, n)
    lp = LinearProgram.from_dense(w + rng.uniform(0, 1, n), [w], ["L"], [w.sum() / 2.3], lb=0.0, ub=1.0,
                                  maximize=True)
    sol = solve_milp(MixedIntegerProgram(lp, np.arange(n)), MilpOptions(node_limit=2))
    assert sol.status in (MilpStatus.LIMIT_WITH_INCUMBENT, MilpStatus.OPTIMAL)
    assert sol.has_incumbent
    assert sol.best_bound >= sol.objective - 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([False, True, "fractional"]))
def test_matches_enumeration(seed, probing):
    mip = random_mip(np.random.default_rng(seed))
    ref = enumerate_milp(mip)
    sol = solve_milp(mip, MilpOptions(probing=probing))
    if ref is None:
        assert sol.status is MilpStatus.INFEASIBLE
        return
    assert sol.optimal
    assert sol.objective == pytest.approx(ref, abs=1e-6)
    xb = sol.x[mip.binaries]
    assert np.all(np.abs(xb - np.round(xb)) <= 1e-6)
    bound = lp_bound(mip).objective
    assert (bound >= sol.objective - 1e-7) if mip.maximize else (bound <= sol.objective + 1e-7)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_deterministic(seed):
    mip = random_mip(np.random.default_rng(seed))
    a, b = solve_milp(mip), solve_milp(mip)
    assert a.status == b.status and a.nodes == b.nodes
    if a.x is not None:
        assert np.array_equal(a.x, b.x)
