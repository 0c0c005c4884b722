import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexdesign.design import Mode, compare_fronts, pareto_sweep
from flexdesign.io import (
    BUNDLED_CASES, FormatError, NetworkConfig, case_text, format_result_table, format_sweep, load_case,
    matpower_to_network, normalize_network_file, parse_matpower_case, parse_network_file,
    parse_result_table, parse_sweep, read_network, serialize_network,
)
from flexdesign.model import CostSpec, validate_network
from flexdesign.sampling import GaussianSpec, SampleSet
from oracles import random_network

UNIT = case_text("unit-net.flexnet")


def test_unit_net_file():
    cfg = parse_network_file(UNIT)
    assert (cfg.net.n_nodes, cfg.net.n_suppliers, cfg.net.n_theta) == (1, 1, 1)
    assert cfg.spec.mean.tolist() == [0.5]
    assert cfg.U == 10000


@pytest.mark.parametrize("name", BUNDLED_CASES)
def test_bundled_cases_load_and_round_trip(name):
    cfg = load_case(name)
    assert validate_network(cfg.net) == []
    text = serialize_network(cfg)
    assert parse_network_file(text) == cfg
    assert normalize_network_file(text) == text


def test_serialize_is_normalize():
    messy = "# comment\nflexnet 1\nnode n1   # trailing\n\nsupplier s1 n1 1.0\ndemand r1 n1 1\nmean 0.50\ncov 0.04\n"
    cfg = parse_network_file(messy)
    assert serialize_network(cfg) == normalize_network_file(messy)
    assert "cov_diag 0.04" in serialize_network(cfg)


def test_missing_covariance_names_field():
    text = "\n".join(l for l in UNIT.splitlines() if not l.startswith("cov"))
    with pytest.raises(FormatError, match="'cov'"):
        parse_network_file(text)
    text = "\n".join(l for l in UNIT.splitlines() if not l.startswith("mean"))
    with pytest.raises(FormatError, match="'mean'"):
        parse_network_file(text)


def test_unknown_key_has_location():
    text = UNIT.replace("units MW", "units MW\n  colour blue")
    with pytest.raises(FormatError) as info:
        parse_network_file(text)
    assert info.value.line == 4 and info.value.col == 3
    assert str(info.value).startswith("line 4, col 3:")


@pytest.mark.parametrize("bad, where", [
    ("supplier s1 n1 one", (5, 16)),
    ("supplier s1 n1", (5, 1)),
    ("supplier s1 n1 nan", (5, 16)),
])
def test_bad_fields_have_location(bad, where):
    text = UNIT.replace("supplier s1 n1 1", bad)
    with pytest.raises(FormatError) as info:
        parse_network_file(text)
    assert (info.value.line, info.value.col) == where


def test_invalid_network_is_rejected():
    with pytest.raises(FormatError, match="invalid network"):
        parse_network_file(UNIT.replace("supplier s1 n1 1", "supplier s1 n9 1"))
    with pytest.raises(FormatError):
        parse_network_file("")
    with pytest.raises(FormatError):
        parse_network_file(UNIT + "cov_diag 1\n")


def test_not_psd_covariance_is_rejected():
    text = UNIT.replace("cov_diag 0.04", "cov -1")
    with pytest.raises(FormatError, match="Gaussian"):
        parse_network_file(text)


def test_read_network_by_path_and_name(tmp_path):
    p = tmp_path / "n.flexnet"
    p.write_text(UNIT)
    assert read_network(p) == read_network("unit-net")


def test_mean_center():
    cfg = load_case("case141")
    assert cfg.mean_is_center and "mean center" in serialize_network(cfg)
    assert cfg.spec.mean.shape == (84,)


def test_matpower_counts():
    net14 = matpower_to_network(parse_matpower_case(case_text("case14.m")))
    assert (net14.n_nodes, net14.n_theta, net14.n_arcs, net14.n_suppliers) == (14, 11, 20, 5)
    assert all(a.capacity == 100 for a in net14.arcs)
    assert [s.capacity for s in net14.suppliers] == [332.4, 140, 100, 100, 100]
    assert validate_network(net14) == []
    net141 = matpower_to_network(parse_matpower_case(case_text("case141.m")))
    assert (net141.n_nodes, net141.n_theta) == (141, 84)
    assert validate_network(net141) == []
    assert load_case("ieee14").net == net14


MINI = """function mpc = mini
mpc.bus = [
\t1\t3\t0\t0;
\t2\t1\t5\t0;
];
mpc.gen = [
\t1\t0\t0\t0\t0\t1\t100\t1\t7;
];
mpc.branch = [
\t1\t2\t0.1;
];
"""


def test_matpower_minimal_and_errors():
    net = matpower_to_network(parse_matpower_case(MINI), arc_capacity=3)
    assert net.n_nodes == 2 and net.n_theta == 1 and net.suppliers[0].capacity == 7
    assert net.arcs[0].capacity == 3
    with pytest.raises(FormatError, match="unknown bus 9"):
        parse_matpower_case(MINI.replace("\t1\t2\t0.1;", "\t1\t9\t0.1;"))
    with pytest.raises(FormatError, match="missing table mpc.branch"):
        parse_matpower_case(MINI.split("mpc.branch")[0])
    with pytest.raises(FormatError, match="row 2"):
        parse_matpower_case(MINI.replace("\t2\t1\t5\t0;", "\t2\tx\t5\t0;"))
    with pytest.raises(FormatError, match="empty"):
        parse_matpower_case(MINI.replace("\t1\t2\t0.1;", ""))


def test_sweep_and_table_round_trip(unit_net):
    s = SampleSet.from_values([[0.5], [1.5], [2.5]])
    mip = pareto_sweep(unit_net, s, [0.0, 0.5, 1.5], "mip")
    cont = pareto_sweep(unit_net, s, [0.0, 0.5, 1.5], "cont")
    for pts in (mip, cont):
        text = format_sweep(pts)
        back = parse_sweep(text, unit_net)
        assert [p.sf for p in back] == [p.sf for p in pts]
        assert [p.eps for p in back] == [p.eps for p in pts]
        assert all(np.array_equal(a.y, b.y) for a, b in zip(back, pts))
        assert all(a.design.flat().tolist() == b.design.flat().tolist() for a, b in zip(back, pts))
        assert format_sweep(back, times=False) == format_sweep(pts, times=False)
    rep = compare_fronts(mip, cont)
    rows = parse_result_table(format_result_table(rep))
    assert [r["SF_K(%)"] for r in rows] == pytest.approx([33.3333, 66.6667, 100.0])
    assert [r["SFbar_K(%)"] for r in rows] == pytest.approx([33.3333, 66.6667, 100.0])
    quiet = parse_result_table(format_result_table(rep, times=False))
    assert all(r["MIP_time(s)"] is None for r in quiet)
    with pytest.raises(FormatError):
        parse_sweep("eps\n")
    with pytest.raises(FormatError):
        parse_result_table("a\tb\n")


@st.composite
def configs(draw):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    net = random_network(rng)
    n = net.n_theta
    B = rng.normal(size=(n, n))
    kind = draw(st.sampled_from(["full", "diag", "equi"]))
    if kind == "full":
        cov = B @ B.T + np.eye(n)
    elif kind == "diag":
        cov = np.diag(rng.uniform(0.1, 5, n))
    else:
        cov = np.full((n, n), 0.3)
        np.fill_diagonal(cov, 1.0)
    weights = None if draw(st.booleans()) else rng.uniform(0.1, 2, net.n_design)
    spec = GaussianSpec(rng.normal(size=n) * 10, cov)
    U = draw(st.sampled_from([1e4, 2e4, 123.5]))
    return NetworkConfig(net, spec, CostSpec.for_network(net, weights), U)


@settings(max_examples=60, deadline=None)
@given(configs())
def test_round_trip_property(cfg):
    text = serialize_network(cfg)
    back = parse_network_file(text)
    assert back == cfg
    assert serialize_network(back) == text
