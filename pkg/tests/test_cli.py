import io
import json

import numpy as np
import pytest

from flexdesign.cli import parse_grid, run_cli
from flexdesign.io import case_text, parse_result_table
from flexdesign.sampling import SampleSet, write_samples


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(map(str, argv)), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def three_samples(tmp_path):
    path = tmp_path / "u.samples"
    write_samples(SampleSet.from_values([[0.5], [1.5], [2.5]]), path)
    return path


def test_parse_grid():
    assert parse_grid("0,0.5,1.5") == [0.0, 0.5, 1.5]
    g = parse_grid("0:10.5:0.25")
    assert len(g) == 43 and g[-1] == 10.5 and g[1] == 0.25


def test_validate_bundled_and_corrupt(tmp_path):
    code, out, _ = cli("validate", "unit-net")
    assert code == 0 and "1 nodes" in out
    bad = tmp_path / "bad.flexnet"
    bad.write_text(case_text("unit-net.flexnet").replace("supplier s1 n1 1", "supplier s1 n1 x"))
    code, out, err = cli("validate", bad)
    assert code == 2 and "line 5, col 16" in err and out == ""
    code, _, err = cli("validate", tmp_path / "missing.flexnet")
    assert code == 2 and err


def test_usage_errors():
    assert cli()[0] == 1
    assert cli("sweep")[0] == 1
    assert cli("sweep", "unit-net", "--mode", "fast", "--k", "3")[0] == 1
    assert cli("sf", "unit-net")[0] == 1  # neither --samples nor --k
    assert cli("sweep", "unit-net", "--k", "3", "--grid", "1,0")[0] == 1
    assert cli("--version")[0] == 0


def test_sweep_unit_net_both_modes(tmp_path, three_samples):
    prefix = tmp_path / "run"
    code, out, _ = cli("sweep", "unit-net", "--samples", three_samples, "--grid", "0,0.5,1.5",
                       "--mode", "both", "--out", prefix)
    assert code == 0
    rows = parse_result_table(out)
    assert [r["SF_K(%)"] for r in rows] == pytest.approx([33.3333, 66.6667, 100.0])
    assert [r["SFbar_K(%)"] for r in rows] == pytest.approx([33.3333, 66.6667, 100.0])
    assert all(r["y_diff(%)"] == 0 for r in rows)
    for suffix in (".mip.sweep", ".cont.sweep", ".table", ".plot.py", ".manifest.json"):
        assert (tmp_path / f"run{suffix}").exists()
    man = json.loads((tmp_path / "run.manifest.json").read_text())
    assert man["samples"]["K"] == 3 and man["grid"] == [0.0, 0.5, 1.5]
    assert {"feas_tol", "round_tol"} <= set(man["tolerances"]) and "numpy" in man["versions"]
    assert man["network"]["bundled"] == "unit-net"
    # compare re-reads the two sweep files
    code, out2, _ = cli("compare", f"{prefix}.mip.sweep", f"{prefix}.cont.sweep")
    assert code == 0 and parse_result_table(out2) == parse_result_table(out)


def test_sweep_single_mode_and_manifest_on_stderr(three_samples):
    code, out, err = cli("sweep", "unit-net", "--samples", three_samples, "--grid", "0,1.5", "--mode", "cont")
    assert code == 0 and err.startswith("manifest: ")
    rows = parse_result_table(out)
    assert rows[0]["SF_K(%)"] is None and rows[1]["SFbar_K(%)"] == 100.0


def test_sweep_is_byte_identical_without_times(tmp_path):
    args = ["sweep", "unit-net", "--k", "8", "--seed", "3", "--grid", "0:1:0.5", "--no-times"]
    a = cli(*args)[1]
    b = cli(*args)[1]
    assert a == b and "\t-\t-\t" in a


def test_sf_zero_covariance(tmp_path):
    net = tmp_path / "z.flexnet"
    net.write_text(case_text("unit-net.flexnet").replace("cov_diag 0.04", "cov_diag 0"))
    code, out, _ = cli("sf", net, "--k", "50", "--seed", "1")
    res = json.loads(out)
    assert code == 0 and res["sf_percent"] == 100.0 and res["manifest"]["samples"]["seed"] == 1


def test_sf_with_design(three_samples):
    res = json.loads(cli("sf", "unit-net", "--samples", three_samples, "--design", "0.5")[1])
    assert res["feasible"] == 2
    assert cli("sf", "unit-net", "--samples", three_samples, "--design", "a")[0] == 1
    assert cli("sf", "three-node", "--samples", three_samples)[0] == 2  # wrong dimension


def test_sample_and_center(tmp_path):
    path = tmp_path / "s.txt"
    assert cli("sample", "three-node", "--k", "5", "--seed", "9", "--out", path)[0] == 0
    assert (tmp_path / "s.txt.manifest.json").exists()
    code, out, _ = cli("sf", "three-node", "--samples", path)
    assert code == 0 and json.loads(out)["K"] == 5
    code, out, _ = cli("center", "unit-net")
    res = json.loads(out)
    assert code == 0 and res["theta"] == pytest.approx([0.5]) and res["psi"] == pytest.approx(-0.5)


def test_export_mps(tmp_path, three_samples):
    path = tmp_path / "p.mps"
    code, out, _ = cli("export-mps", "unit-net", "--samples", three_samples, "--eps", "0.4", "--out", path)
    assert code == 0 and path.read_text().endswith("ENDATA\n")
    man = json.loads((tmp_path / "p.mps.manifest.json").read_text())
    assert man["n_binary"] == 3


def test_solver_failure_exit_code(tmp_path, three_samples, monkeypatch):
    import flexdesign.design as design
    from flexdesign.design import DesignError

    def boom(*a, **k):
        raise DesignError("synthetic failure")

    monkeypatch.setattr(design, "solve_design_continuous", boom)
    prefix = tmp_path / "f"
    code, _, err = cli("sweep", "unit-net", "--samples", three_samples, "--grid", "0,1", "--mode", "cont",
                       "--out", prefix)
    assert code == 3 and "synthetic failure" in err
    assert (tmp_path / "f.cont.sweep").exists()  # partial results are kept
