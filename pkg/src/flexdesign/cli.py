"""Command-line interface.

Exit codes: 0 success, 1 usage, 2 parse or validation error, 3 solver
failure, 4 infeasible problem.  ``NET`` is a network file path or one of
the bundled case names.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .design import (
    ComparisonReport, ComparisonRow, DesignError, Direction, Mode, ROUND_TOL,
    build_scenario_program, compare_fronts, pareto_sweep,
)
from .flexibility import FEAS_TOL, SolverFailure, estimate_sf, feasible_center
from .io import (
    BUNDLED_CASES, FormatError, case_text, format_result_table, format_sweep, parse_sweep,
    plot_script, read_network, write_manifest,
)
from .lp import SolverOptions
from .milp import MilpOptions
from .model import DesignVector
from .mps import to_mps
from .sampling import GENERATOR_TAG, SampleSet, draw_samples, read_samples, write_samples

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_SOLVER, EXIT_INFEASIBLE = 0, 1, 2, 3, 4

DEFAULT_GRIDS = {
    "unit-net": "0:2:0.5",
    "three-node": "0:10.5:0.25",
    "ieee14": "0:65:2.5",
    "case141": "0:300:10",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` or an inclusive range ``start:stop:step``."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bad grid range {text!r} (expected start:stop:step)")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise UsageError("grid step must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [float(np.round(start + i * step, 12)) for i in range(n)]
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _net_source(arg: str) -> dict:
    if arg in BUNDLED_CASES:
        return {"bundled": arg, "sha256": _digest(case_text(f"{arg}.flexnet"))}
    return {"path": str(arg), "sha256": _digest(Path(arg).read_text())}


def _base_manifest(args, argv) -> dict:
    return {
        "command": args.command,
        "argv": list(argv),
        "cwd": str(Path.cwd()),
        "network": _net_source(args.net) if hasattr(args, "net") else None,
        "tolerances": {
            "feas_tol": FEAS_TOL,
            "round_tol": ROUND_TOL,
            "lp_feas_tol": SolverOptions().feas_tol,
            "lp_opt_tol": SolverOptions().opt_tol,
            "int_tol": MilpOptions().int_tol,
            "mip_gap_tol": MilpOptions().mip_gap_tol,
        },
        "versions": {
            "flexdesign": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "generator": GENERATOR_TAG,
    }


def _samples(args, cfg) -> tuple[SampleSet, dict]:
    if getattr(args, "samples", None):
        s = read_samples(args.samples)
        info = {"file": args.samples, "sha256": _digest(Path(args.samples).read_text()),
                "K": s.K, "seed": s.seed, "tag": s.tag}
    else:
        if args.k is None:
            raise UsageError("give --samples FILE or --k K (with --seed)")
        s = draw_samples(cfg.spec, args.k, args.seed)
        info = {"K": args.k, "seed": args.seed, "tag": s.tag}
    if s.dim != cfg.net.n_theta:
        raise FormatError(f"samples have dimension {s.dim}, network expects {cfg.net.n_theta}")
    return s, info


def _add_sample_args(p):
    p.add_argument("--samples", help="sample file (see the sample command)")
    p.add_argument("--k", type=int, help="draw K samples from the network's Gaussian spec")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="flexdesign", description="Flexibility-driven capacity design of linear networks.")
    ap.add_argument("--version", action="version", version=f"flexdesign {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", help="parse and check a network file")
    p.add_argument("net")

    p = sub.add_parser("sample", help="draw a sample file")
    p.add_argument("net")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("sf", help="estimate the sample flexibility of a design")
    p.add_argument("net")
    p.add_argument("--design", help="comma separated expansions, suppliers then arcs (default: zero)")
    _add_sample_args(p)

    p = sub.add_parser("center", help="feasible center of the zero (or given) design")
    p.add_argument("net")
    p.add_argument("--design")

    p = sub.add_parser("sweep", help="Pareto sweep over cost budgets")
    p.add_argument("net")
    _add_sample_args(p)
    p.add_argument("--mode", choices=["mip", "cont", "both"], default="both")
    p.add_argument("--grid", help="budgets: a,b,c or start:stop:step (inclusive)")
    p.add_argument("--time-limit", type=float, default=None, help="seconds per MIP point")
    p.add_argument("--u", type=float, default=None, help="big-U constant (default: from the network)")
    p.add_argument("--screen", action="store_true", help="fix scenarios decided at the zero design first")
    p.add_argument("--no-times", action="store_true", help="write '-' for timings (reproducible tables)")
    p.add_argument("--out", help="output prefix for sweep files, table, manifest and plot script")

    p = sub.add_parser("compare", help="compare a MIP and a continuous sweep file")
    p.add_argument("mip")
    p.add_argument("cont")
    p.add_argument("--no-times", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("export-mps", help="write the scenario program in MPS format")
    p.add_argument("net")
    _add_sample_args(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--mode", choices=["mip", "cont"], default="mip")
    p.add_argument("--direction", choices=[d.value for d in Direction], default="max-sf")
    p.add_argument("--u", type=float, default=None)
    p.add_argument("--out", required=True)
    return ap


def _design(arg, net) -> DesignVector:
    if not arg:
        return DesignVector.zeros(net)
    try:
        vals = [float(v) for v in arg.split(",")]
        return DesignVector.from_flat(net, vals)
    except ValueError as exc:
        raise UsageError(f"bad --design: {exc}") from None


def _single_mode_report(points, mode: Mode) -> ComparisonReport:
    rows = []
    for p in points:
        mip = mode is Mode.MIP
        rows.append(ComparisonRow(
            p.eps, p.cost, p.sf if mip else None, None if mip else p.sf, None, None,
            p.time if mip else None, None if mip else p.time, p.optimal if mip else False, False,
        ))
    return ComparisonReport(rows)


def _cmd_validate(args, out, err):
    cfg = read_network(args.net)
    net = cfg.net
    print(f"ok: {net.n_nodes} nodes, {net.n_arcs} arcs, {net.n_suppliers} suppliers, "
          f"{net.n_theta} demands", file=out)
    return EXIT_OK


def _cmd_sample(args, out, err, argv):
    cfg = read_network(args.net)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    s = draw_samples(cfg.spec, args.k, args.seed)
    write_samples(s, args.out)
    man = _base_manifest(args, argv)
    man["samples"] = {"K": args.k, "seed": args.seed, "tag": s.tag, "out": args.out}
    write_manifest(f"{args.out}.manifest.json", man)
    print(f"wrote {args.k} samples to {args.out}", file=out)
    return EXIT_OK


def _cmd_sf(args, out, err, argv):
    cfg = read_network(args.net)
    s, info = _samples(args, cfg)
    d = _design(args.design, cfg.net)
    est = estimate_sf(cfg.net, d, s)
    man = _base_manifest(args, argv)
    man["samples"] = info
    print(json.dumps({"sf": est.value, "sf_percent": 100.0 * est.value, "K": est.K,
                      "feasible": int(est.indicators.sum()), "manifest": man}, indent=2), file=out)
    return EXIT_OK


def _cmd_center(args, out, err, argv):
    cfg = read_network(args.net)
    d = _design(args.design, cfg.net)
    res = feasible_center(cfg.net, d, spec=cfg.spec)
    print(json.dumps({"theta": res.theta.tolist(), "psi": res.psi, "boxed": res.boxed,
                      "manifest": _base_manifest(args, argv)}, indent=2), file=out)
    return EXIT_OK


def _cmd_sweep(args, out, err, argv):
    cfg = read_network(args.net)
    s, info = _samples(args, cfg)
    grid_text = args.grid or DEFAULT_GRIDS.get(str(args.net))
    if grid_text is None:
        raise UsageError("--grid is required for network files")
    grid = parse_grid(grid_text)
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("grid must be nonempty and strictly increasing")
    U = args.u if args.u is not None else cfg.U
    modes = [Mode.MIP, Mode.CONTINUOUS] if args.mode == "both" else [Mode(args.mode)]
    times = not args.no_times
    results = {}
    prefix = args.out
    for mode in modes:
        pts = pareto_sweep(cfg.net, s, grid, mode, U=U, time_limit=args.time_limit,
                           cost_spec=cfg.cost_spec, screen=args.screen)
        results[mode] = pts
        if prefix:
            Path(f"{prefix}.{mode.value}.sweep").write_text(format_sweep(pts, times))
    if len(modes) == 2:
        report = compare_fronts(results[Mode.MIP], results[Mode.CONTINUOUS])
    else:
        report = _single_mode_report(results[modes[0]], modes[0])
    table = format_result_table(report, times)
    out.write(table)
    man = _base_manifest(args, argv)
    man.update({"samples": info, "grid": grid, "modes": [m.value for m in modes], "U": U,
                "time_limit": args.time_limit, "screen": args.screen, "timings": times})
    if prefix:
        Path(f"{prefix}.table").write_text(table)
        Path(f"{prefix}.plot.py").write_text(plot_script(f"{Path(prefix).name}.table",
                                                         f"{Path(prefix).name}.png"))
        man["outputs"] = [f"{prefix}.{m.value}.sweep" for m in modes] + [f"{prefix}.table"]
        write_manifest(f"{prefix}.manifest.json", man)
    else:
        print("manifest: " + json.dumps(man, sort_keys=True), file=err)
    failed = [p for pts in results.values() for p in pts if p.status.startswith(("error", "repair"))]
    for p in failed:
        print(f"eps={p.eps:g}: {p.status}", file=err)
    if failed:
        return EXIT_SOLVER
    if any(not p.optimal for p in results.get(Mode.MIP, [])):
        print("warning: some MIP points stopped at the time limit", file=err)
    return EXIT_OK


def _cmd_compare(args, out, err, argv):
    mip = parse_sweep(Path(args.mip).read_text())
    cont = parse_sweep(Path(args.cont).read_text())
    report = compare_fronts(mip, cont)
    table = format_result_table(report, not args.no_times)
    out.write(table)
    man = _base_manifest(args, argv)
    man["inputs"] = {p: _digest(Path(p).read_text()) for p in (args.mip, args.cont)}
    if args.out:
        Path(args.out).write_text(table)
        write_manifest(f"{args.out}.manifest.json", man)
    else:
        print("manifest: " + json.dumps(man, sort_keys=True), file=err)
    bad = report.violations
    for r in bad:
        print(f"eps={r.eps:g}: continuous SF exceeds the proven MIP optimum", file=err)
    return EXIT_OK


def _cmd_export_mps(args, out, err, argv):
    cfg = read_network(args.net)
    s, info = _samples(args, cfg)
    U = args.u if args.u is not None else cfg.U
    prog = build_scenario_program(cfg.net, s, args.mode, args.direction, args.eps, U, cfg.cost_spec)
    problem = prog.mip if prog.mode is Mode.MIP else prog.lp
    Path(args.out).write_text(to_mps(problem))
    man = _base_manifest(args, argv)
    man.update({"samples": info, "eps": args.eps, "mode": args.mode, "direction": args.direction, "U": U,
                "n_vars": prog.n_vars, "n_rows": prog.n_rows, "n_binary": prog.n_binary})
    write_manifest(f"{args.out}.manifest.json", man)
    print(f"wrote {prog.n_vars} columns, {prog.n_rows} rows to {args.out}", file=out)
    return EXIT_OK


_COMMANDS = {
    "sample": _cmd_sample, "sf": _cmd_sf, "center": _cmd_center, "sweep": _cmd_sweep,
    "compare": _cmd_compare, "export-mps": _cmd_export_mps,
}


def run_cli(argv=None, out=None, err=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("flexdesign: a command is required (try --help)")
        if args.command == "validate":
            return _cmd_validate(args, out, err)
        return _COMMANDS[args.command](args, out, err, argv)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except (FormatError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE
    except (SolverFailure, DesignError) as exc:
        msg = str(exc)
        print(f"solver failure: {msg}", file=err)
        return EXIT_INFEASIBLE if "infeasible" in msg else EXIT_SOLVER


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
