import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexdesign.design import (
    ComparisonReport, DesignError, GridMismatch, Mode, ParetoPoint, build_scenario_program,
    compare_fronts, enumerate_design_optimum, pareto_sweep, screen_scenarios, solve_design_continuous,
    solve_design_min_cost, solve_design_mip,
)
from flexdesign.flexibility import estimate_sf
from flexdesign.io import load_case
from flexdesign.lp import solve_lp
from flexdesign.model import DesignVector
from flexdesign.sampling import SampleSet, draw_samples
from oracles import best_sf_by_enumeration, random_design_case as random_case

THREE = SampleSet.from_values([[0.5], [1.5], [2.5]])


def test_unit_net_counts(unit_net):
    prog = build_scenario_program(unit_net, SampleSet.from_values([[0.5]]), "mip", eps=1.0)
    assert prog.n_rows == 2 + 1 + 1
    assert prog.n_vars == 1 + 1 + 1  # d^s, s, y
    assert prog.n_binary == 1


def test_three_node_counts():
    cfg = load_case("three-node")
    prog = build_scenario_program(cfg.net, draw_samples(cfg.spec, 1000, 1), "cont", eps=1.0)
    assert (prog.n_vars, prog.n_rows, prog.n_binary) == (4003, 9001, 0)


def test_ieee14_counts():
    cfg = load_case("ieee14")
    prog = build_scenario_program(cfg.net, draw_samples(cfg.spec, 2000, 1), "mip", eps=1.0)
    assert prog.n_vars - prog.n_binary == 50025
    assert prog.n_binary == 2000
    assert prog.n_rows == 128001


def test_build_rejects_bad_input(unit_net):
    with pytest.raises(ValueError):
        build_scenario_program(unit_net, THREE, U=0.0)
    with pytest.raises(ValueError):
        build_scenario_program(unit_net, THREE, eps=-1.0)
    with pytest.raises(ValueError):
        build_scenario_program(unit_net, SampleSet.from_values([[1.0, 2.0]]))


@pytest.mark.parametrize("screen", [False, True])
def test_mip_examples(unit_net, screen):
    big = solve_design_mip(build_scenario_program(unit_net, THREE, "mip", eps=10.0), screen=screen)
    assert big.sf == 1.0 and big.optimal
    assert big.design.supplier[0] >= 1.5 - 1e-7
    assert big.cost <= 10.0 + 1e-7
    none = solve_design_mip(build_scenario_program(unit_net, THREE, "mip", eps=0.0), screen=screen)
    assert none.sf == estimate_sf(unit_net, DesignVector.zeros(unit_net), THREE).value
    small = solve_design_mip(build_scenario_program(unit_net, THREE, "mip", eps=0.4), screen=screen)
    assert small.sf == pytest.approx(1 / 3)
    assert small.y.tolist() == [0, 1, 1]


def test_continuous_examples(unit_net):
    pt, y_frac = solve_design_continuous(build_scenario_program(unit_net, THREE, "cont", eps=0.5))
    assert pt.sf == pytest.approx(2 / 3)
    assert pt.y.tolist() == [0, 0, 1]
    assert y_frac[0] == 0 and y_frac[1] == 0 and y_frac[2] > 0
    zero, _ = solve_design_continuous(build_scenario_program(unit_net, THREE, "cont", eps=0.0))
    assert zero.sf == estimate_sf(unit_net, DesignVector.zeros(unit_net), THREE).value


def test_continuous_equals_mip_when_relaxation_is_integral(unit_net):
    s = SampleSet.from_values([[0.2], [0.9]])
    cont, y_frac = solve_design_continuous(build_scenario_program(unit_net, s, "cont", eps=0.0))
    mip = solve_design_mip(build_scenario_program(unit_net, s, "mip", eps=0.0))
    assert np.all(y_frac == 0)
    assert cont.sf == mip.sf == 1.0 and np.array_equal(cont.y, mip.y)


def test_direction_checks(unit_net):
    with pytest.raises(ValueError):
        solve_design_mip(build_scenario_program(unit_net, THREE, "mip", "min-cost", eps=0.5))
    with pytest.raises(ValueError):
        solve_design_min_cost(build_scenario_program(unit_net, THREE, "mip", "max-sf", eps=0.5))


def _min_cost(net, floor, mode="mip", samples=THREE, screen=False):
    prog = build_scenario_program(net, samples, mode, "min-cost", eps=floor)
    return solve_design_min_cost(prog, screen=screen)


@pytest.mark.parametrize("screen", [False, True])
def test_min_cost_examples(unit_net, screen):
    assert _min_cost(unit_net, 0.0, screen=screen).cost == pytest.approx(0.0, abs=1e-9)
    pt = _min_cost(unit_net, 2 / 3, screen=screen)
    assert pt.cost == pytest.approx(0.5, abs=1e-7)
    assert pt.sf == pytest.approx(2 / 3) and pt.optimal
    surplus = SampleSet.from_values([[0.5], [-2.0]])
    assert _min_cost(unit_net, 1.0, samples=surplus, screen=screen).status == "infeasible"


def test_min_cost_continuous_reports_floor(unit_net):
    # tiny fractional indicators meet the relaxed floor at no cost, so
    # rounding can leave the floor unmet; the point says so
    pt = _min_cost(unit_net, 2 / 3, "cont")
    assert pt.details["floor_met"] == (pt.sf >= 2 / 3 - 1e-12)
    assert estimate_sf(unit_net, pt.design, THREE).value >= pt.sf
    easy = _min_cost(unit_net, 1 / 3, "cont")
    assert easy.details["floor_met"] and easy.cost == pytest.approx(0.0, abs=1e-9)
    surplus = SampleSet.from_values([[0.5], [-2.0]])
    assert _min_cost(unit_net, 1.0, "cont", samples=surplus).status == "infeasible"


def test_sweep_examples(unit_net):
    pts = pareto_sweep(unit_net, THREE, [0.0, 0.5, 1.5], "mip")
    assert [p.sf for p in pts] == pytest.approx([1 / 3, 2 / 3, 1.0])
    cont = pareto_sweep(unit_net, THREE, [0.0, 0.5, 1.5], "cont")
    assert [p.sf for p in cont] == pytest.approx([1 / 3, 2 / 3, 1.0])
    single = pareto_sweep(unit_net, THREE, [0.0], "mip")
    assert len(single) == 1 and single[0].sf == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        pareto_sweep(unit_net, THREE, [0.5, 0.5])


def test_sweep_records_failures(unit_net, monkeypatch):
    import flexdesign.design as design

    def boom(*a, **k):
        raise DesignError("synthetic failure")

    monkeypatch.setattr(design, "solve_design_continuous", boom)
    pts = pareto_sweep(unit_net, THREE, [0.0, 1.0], "cont")
    assert len(pts) == 2 and all(p.status.startswith("error") for p in pts)


def _point(eps, sf, y, optimal=True, mode=Mode.MIP):
    y = np.asarray(y, dtype=np.int8)
    return ParetoPoint(eps, 0.0, sf, None, y, 1.0, mode, optimal)


def test_compare_identical():
    a = [_point(0.0, 0.5, [0, 1]), _point(1.0, 1.0, [0, 0])]
    rep = compare_fronts(a, a)
    assert all(r.y_diff_pct == 0.0 for r in rep.rows)
    assert rep.violations == [] and rep.time_ratio == 1.0


def test_compare_hamming_percentage():
    y1 = np.zeros(10000, dtype=np.int8)
    y2 = y1.copy()
    y2[:49] = 1
    rep = compare_fronts([_point(0.0, 1.0, y1)], [_point(0.0, 1 - 49 / 10000, y2, mode=Mode.CONTINUOUS)])
    assert rep.rows[0].y_diff_pct == pytest.approx(0.49)
    assert rep.mean_y_diff_pct == pytest.approx(0.49)


def test_compare_flags_violation():
    rep = compare_fronts([_point(0.0, 0.5, [0, 1])], [_point(0.0, 1.0, [0, 0], mode=Mode.CONTINUOUS)])
    assert len(rep.violations) == 1
    not_proven = compare_fronts([_point(0.0, 0.5, [0, 1], optimal=False)], [_point(0.0, 1.0, [0, 0])])
    assert not_proven.violations == []


def test_compare_grid_mismatch():
    with pytest.raises(GridMismatch):
        compare_fronts([_point(0.0, 1.0, [0])], [_point(0.5, 1.0, [0])])
    with pytest.raises(GridMismatch):
        compare_fronts([_point(0.0, 1.0, [0])], [])


def test_enumeration_helper_matches_independent_oracle(unit_net):
    prog = build_scenario_program(unit_net, THREE, "mip", eps=0.4)
    sf, y = enumerate_design_optimum(prog)
    assert sf == pytest.approx(best_sf_by_enumeration(unit_net, THREE.samples, 0.4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mip_matches_enumeration(seed):
    net, s, eps = random_case(seed)
    pt = solve_design_mip(build_scenario_program(net, s, "mip", eps=eps))
    assert pt.optimal
    assert pt.sf == pytest.approx(best_sf_by_enumeration(net, s.samples, eps), abs=1e-6)
    assert pt.cost <= eps + 1e-7
    assert pt.sf == pytest.approx(1 - pt.y.mean())


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_screening_keeps_the_optimum(seed):
    net, s, eps = random_case(seed, max_k=8)
    prog = build_scenario_program(net, s, "mip", eps=eps)
    plain = solve_design_mip(prog)
    screened = solve_design_mip(prog, screen=screen_scenarios(net, s))
    assert plain.sf == pytest.approx(screened.sf, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_relaxation_sandwich(seed):
    net, s, eps = random_case(seed, max_k=8)
    mip = solve_design_mip(build_scenario_program(net, s, "mip", eps=eps))
    cprog = build_scenario_program(net, s, "cont", eps=eps)
    relax = solve_lp(cprog.lp).objective
    cont, _ = solve_design_continuous(cprog)
    assert relax >= mip.sf - 1e-7
    assert cont.sf <= mip.sf + 1e-12
    # the rounded indicator is realized by the returned design
    realized = estimate_sf(net, cont.design, s)
    assert np.all(realized.indicators >= 1 - cont.y)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pareto_monotone_and_direction_consistent(seed):
    net, s, _ = random_case(seed, max_k=6)
    grid = [0.0, 0.5, 1.0, 2.0, 4.0]
    pts = pareto_sweep(net, s, grid, "mip")
    sfs = [p.sf for p in pts]
    assert all(b >= a - 1e-12 for a, b in zip(sfs, sfs[1:]))
    assert all(p.cost <= p.eps + 1e-7 for p in pts)
    mid = pts[2]
    back = solve_design_min_cost(build_scenario_program(net, s, "mip", "min-cost", eps=mid.sf))
    assert back.cost <= mid.eps + 1e-6


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_doubling_u_keeps_indicators(seed):
    net, s, eps = random_case(seed, max_k=6)
    a = solve_design_mip(build_scenario_program(net, s, "mip", eps=eps, U=1e4))
    b = solve_design_mip(build_scenario_program(net, s, "mip", eps=eps, U=2e4))
    assert a.sf == b.sf
    ca, _ = solve_design_continuous(build_scenario_program(net, s, "cont", eps=eps, U=1e4))
    cb, _ = solve_design_continuous(build_scenario_program(net, s, "cont", eps=eps, U=2e4))
    assert np.array_equal(ca.y, cb.y)
