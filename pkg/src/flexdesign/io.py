"""Text formats: network files, MATPOWER cases, sweep outputs and tables.

Network files (``flexnet 1``) are line based.  ``#`` starts a comment and
every other non-blank line is a keyword followed by whitespace separated
fields::

    flexnet 1
    units MW
    node <id>
    supplier <id> <node> <capacity>
    arc <id> <tail> <head> <capacity>
    demand <id> <node> <theta_index>
    mean <m1> ... <mn> | mean center
    cov <row of n entries>            (n lines, full matrix)
    cov_diag <v1> ... <vn>
    cov_equi <variance> <covariance>
    cost_weights <w1> ... <w_nd>      (optional, [suppliers, arcs])
    big_u <U>                         (optional, default 10000)

``mean center`` places the mean at the feasible center of the zero design.
Exactly one covariance form is allowed.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .design import DEFAULT_U, ComparisonReport, Mode, ParetoPoint
from .model import Arc, CostSpec, Demand, DesignVector, Network, Supplier, validate_network
from .sampling import GaussianSpec, cholesky_factor

__all__ = [
    "FORMAT_VERSION",
    "FormatError",
    "NetworkConfig",
    "parse_network_file",
    "serialize_network",
    "normalize_network_file",
    "read_network",
    "MatpowerCase",
    "parse_matpower_case",
    "matpower_to_network",
    "BUNDLED_CASES",
    "load_case",
    "case_text",
    "format_sweep",
    "parse_sweep",
    "format_result_table",
    "parse_result_table",
    "TABLE_COLUMNS",
    "write_manifest",
    "plot_script",
]

FORMAT_VERSION = 1
_TOKEN = re.compile(r"\S+")


class FormatError(ValueError):
    """Parse or validation failure, with a 1-based location when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = "" if line is None else f"line {line}, col {col or 1}: "
        super().__init__(where + message)


def _fmt(x: float) -> str:
    x = float(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _tokens(line: str):
    body = line.split("#", 1)[0]
    return [(m.group(), m.start() + 1) for m in _TOKEN.finditer(body)]


def _number(tok, lineno) -> float:
    text, col = tok
    try:
        v = float(text)
    except ValueError:
        raise FormatError(f"expected a number, got {text!r}", lineno, col) from None
    if math.isnan(v):
        raise FormatError("NaN is not allowed", lineno, col)
    return v


def _integer(tok, lineno) -> int:
    text, col = tok
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"expected an integer, got {text!r}", lineno, col) from None


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    """Everything a network file declares."""

    net: Network
    spec: GaussianSpec
    cost_spec: CostSpec
    U: float = DEFAULT_U
    mean_is_center: bool = False
    cov_form: str = "full"  # "full", "diag" or "equi"

    def __eq__(self, other):
        if not isinstance(other, NetworkConfig):
            return NotImplemented
        return (
            self.net == other.net
            and np.array_equal(self.spec.mean, other.spec.mean)
            and np.array_equal(self.spec.covariance, other.spec.covariance)
            and np.array_equal(self.cost_spec.weights, other.cost_spec.weights)
            and self.U == other.U
            and self.mean_is_center == other.mean_is_center
        )


_ARITY = {"node": 1, "supplier": 3, "arc": 4, "demand": 3, "units": 1, "big_u": 1, "cov_equi": 2}
_KEYWORDS = {"flexnet", "node", "supplier", "arc", "demand", "units", "mean", "cov", "cov_diag",
             "cov_equi", "cost_weights", "big_u"}


def parse_network_file(text: str) -> NetworkConfig:
    """Parse a ``flexnet`` document.

    Raises :class:`FormatError` on the first syntax problem (with line and
    column), on a missing required field and on network invariant
    violations.
    """
    nodes, arcs, suppliers, demands = [], [], [], []
    units = "MW"
    mean = None
    mean_center = False
    cov_rows, cov_diag, cov_equi = [], None, None
    cov_line = None
    weights = None
    U = DEFAULT_U
    seen_header = False
    seen_once = set()

    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = _tokens(line)
        if not toks:
            continue
        key, kcol = toks[0]
        args = toks[1:]
        if not seen_header:
            if key != "flexnet":
                raise FormatError("document must start with 'flexnet <version>'", lineno, kcol)
            if len(args) != 1 or _integer(args[0], lineno) != FORMAT_VERSION:
                col = args[0][1] if args else kcol
                raise FormatError(f"unsupported format version (expected {FORMAT_VERSION})", lineno, col)
            seen_header = True
            continue
        if key not in _KEYWORDS or key == "flexnet":
            raise FormatError(f"unknown key {key!r}", lineno, kcol)
        if key in _ARITY and len(args) != _ARITY[key]:
            col = args[_ARITY[key]][1] if len(args) > _ARITY[key] else kcol
            raise FormatError(f"{key!r} takes {_ARITY[key]} field(s), got {len(args)}", lineno, col)
        if key in {"units", "mean", "cov_diag", "cov_equi", "cost_weights", "big_u"}:
            if key in seen_once:
                raise FormatError(f"{key!r} given twice", lineno, kcol)
            seen_once.add(key)
        if key.startswith("cov"):
            forms = {"cov": bool(cov_rows), "cov_diag": cov_diag is not None, "cov_equi": cov_equi is not None}
            if any(v for k, v in forms.items() if k != key):
                raise FormatError("only one covariance form may be given", lineno, kcol)
            cov_line = cov_line or lineno

        if key == "node":
            nodes.append(args[0][0])
        elif key == "supplier":
            suppliers.append(Supplier(args[0][0], args[1][0], _number(args[2], lineno)))
        elif key == "arc":
            arcs.append(Arc(args[0][0], args[1][0], args[2][0], _number(args[3], lineno)))
        elif key == "demand":
            demands.append(Demand(args[0][0], args[1][0], _integer(args[2], lineno)))
        elif key == "units":
            units = args[0][0]
        elif key == "mean":
            if len(args) == 1 and args[0][0] == "center":
                mean_center = True
            elif not args:
                raise FormatError("'mean' needs values or 'center'", lineno, kcol)
            else:
                mean = [_number(t, lineno) for t in args]
        elif key == "cov":
            cov_rows.append(([_number(t, lineno) for t in args], lineno, kcol))
        elif key == "cov_diag":
            cov_diag = [_number(t, lineno) for t in args]
        elif key == "cov_equi":
            cov_equi = (_number(args[0], lineno), _number(args[1], lineno))
        elif key == "cost_weights":
            weights = ([_number(t, lineno) for t in args], lineno, kcol)
        elif key == "big_u":
            U = _number(args[0], lineno)
            if not U > 0:
                raise FormatError("big_u must be positive", lineno, args[0][1])

    if not seen_header:
        raise FormatError("empty document (missing 'flexnet' header)", 1, 1)

    net = Network(tuple(nodes), tuple(arcs), tuple(suppliers), tuple(demands), units)
    problems = validate_network(net)
    if problems:
        raise FormatError("invalid network: " + "; ".join(problems))
    n = net.n_theta
    if mean is None and not mean_center:
        raise FormatError("missing field 'mean'")
    if mean is not None and len(mean) != n:
        raise FormatError(f"'mean' has {len(mean)} entries, network has {n} demands")

    if cov_rows:
        form = "full"
        if len(cov_rows) != n:
            raise FormatError(f"'cov' has {len(cov_rows)} rows, expected {n}", cov_rows[-1][1], cov_rows[-1][2])
        for row, ln, col in cov_rows:
            if len(row) != n:
                raise FormatError(f"'cov' row has {len(row)} entries, expected {n}", ln, col)
        cov = np.array([r for r, _, _ in cov_rows])
    elif cov_diag is not None:
        form = "diag"
        if len(cov_diag) != n:
            raise FormatError(f"'cov_diag' has {len(cov_diag)} entries, expected {n}", cov_line, 1)
        cov = np.diag(cov_diag)
    elif cov_equi is not None:
        form = "equi"
        cov = np.full((n, n), cov_equi[1])
        np.fill_diagonal(cov, cov_equi[0])
    else:
        raise FormatError("missing field 'cov'")

    if weights is None:
        cost_spec = CostSpec.for_network(net)
    else:
        try:
            cost_spec = CostSpec.for_network(net, weights[0])
        except ValueError as exc:
            raise FormatError(str(exc), weights[1], weights[2]) from None

    try:
        if mean_center:
            from .flexibility import feasible_center

            spec0 = GaussianSpec(np.zeros(n), cov)
            mean = feasible_center(net, spec=spec0).theta
        spec = GaussianSpec(np.asarray(mean, dtype=float), cov)
        cholesky_factor(spec.covariance)  # reject non-PSD input here, not at sampling time
    except ValueError as exc:
        raise FormatError(f"invalid Gaussian spec: {exc}", cov_line) from None
    return NetworkConfig(net, spec, cost_spec, U, mean_center, form)


def _cov_form(cov: np.ndarray) -> str:
    n = cov.shape[0]
    off = cov[~np.eye(n, dtype=bool)]
    if np.all(off == 0):
        return "diag"
    d = np.diag(cov)
    if np.all(d == d[0]) and np.all(off == off[0]):
        return "equi"
    return "full"


def serialize_network(cfg: NetworkConfig) -> str:
    """Canonical text: fixed key order, shortest exact covariance form."""
    net = cfg.net
    out = [f"flexnet {FORMAT_VERSION}", f"units {net.units}"]
    out += [f"node {n}" for n in net.nodes]
    out += [f"supplier {s.id} {s.node} {_fmt(s.capacity)}" for s in net.suppliers]
    out += [f"arc {a.id} {a.tail} {a.head} {_fmt(a.capacity)}" for a in net.arcs]
    out += [f"demand {d.id} {d.node} {d.theta_index}" for d in net.demands]
    if cfg.mean_is_center:
        out.append("mean center")
    else:
        out.append("mean " + " ".join(_fmt(v) for v in cfg.spec.mean))
    cov = cfg.spec.covariance
    form = _cov_form(cov)
    if form == "diag":
        out.append("cov_diag " + " ".join(_fmt(v) for v in np.diag(cov)))
    elif form == "equi":
        out.append(f"cov_equi {_fmt(cov[0, 0])} {_fmt(cov[0, 1])}")
    else:
        out += ["cov " + " ".join(_fmt(v) for v in row) for row in cov]
    if not cfg.cost_spec.is_default:
        out.append("cost_weights " + " ".join(_fmt(w) for w in cfg.cost_spec.weights))
    if cfg.U != DEFAULT_U:
        out.append(f"big_u {_fmt(cfg.U)}")
    return "\n".join(out) + "\n"


def normalize_network_file(text: str) -> str:
    return serialize_network(parse_network_file(text))


def read_network(path_or_name) -> NetworkConfig:
    """Load a bundled case by name or a network file by path."""
    if str(path_or_name) in BUNDLED_CASES:
        return load_case(str(path_or_name))
    return parse_network_file(Path(path_or_name).read_text())


# ----------------------------------------------------------------- MATPOWER


@dataclass
class MatpowerCase:
    bus: np.ndarray  # columns: id, Pd
    gen: np.ndarray  # columns: bus, Pmax
    branch: np.ndarray  # columns: from, to


_MATRIX = re.compile(r"mpc\.(\w+)\s*=\s*\[(.*?)\]\s*;", re.S)


def _table(name: str, body: str, start_line: int, min_cols: int) -> np.ndarray:
    rows = []
    for i, raw in enumerate(re.split(r"[;\n]", body)):
        text = raw.split("%", 1)[0].strip()
        if not text:
            continue
        try:
            vals = [float(t) for t in text.split()]
        except ValueError:
            raise FormatError(f"mpc.{name} row {len(rows) + 1}: non-numeric entry") from None
        if len(vals) < min_cols:
            raise FormatError(f"mpc.{name} row {len(rows) + 1}: expected at least {min_cols} columns, got {len(vals)}")
        rows.append(vals)
    if not rows:
        raise FormatError(f"mpc.{name} is empty")
    width = min(len(r) for r in rows)
    return np.array([r[:width] for r in rows])


def parse_matpower_case(text: str) -> MatpowerCase:
    """Read the bus, gen and branch tables of a MATPOWER case file.

    Only bus id and real demand, generator bus and ``Pmax``, and branch
    endpoints are kept.
    """
    clean = "\n".join(line.split("%", 1)[0] for line in text.splitlines())
    tables = {}
    for m in _MATRIX.finditer(clean):
        tables[m.group(1)] = m.group(2)
    need = {"bus": 3, "gen": 9, "branch": 2}
    for name, cols in need.items():
        if name not in tables:
            raise FormatError(f"missing table mpc.{name}")
    bus = _table("bus", tables["bus"], 0, 3)
    gen = _table("gen", tables["gen"], 0, 9)
    branch = _table("branch", tables["branch"], 0, 2)
    ids = set(bus[:, 0].astype(int))
    for i, (f, t) in enumerate(branch[:, :2].astype(int), start=1):
        if f not in ids or t not in ids:
            raise FormatError(f"mpc.branch row {i}: unknown bus {f if f not in ids else t}")
    for i, b in enumerate(gen[:, 0].astype(int), start=1):
        if b not in ids:
            raise FormatError(f"mpc.gen row {i}: unknown bus {b}")
    return MatpowerCase(bus[:, [0, 2]], gen[:, [0, 8]], branch[:, :2])


def matpower_to_network(case: MatpowerCase, arc_capacity: float = 100.0) -> Network:
    """Buses become nodes, generators suppliers (capacity ``Pmax``), branches
    arcs with a uniform capacity, and every bus with nonzero demand one entry
    of ``theta`` (in bus order)."""
    nodes = tuple(str(int(b)) for b in case.bus[:, 0])
    suppliers = tuple(Supplier(f"G{i + 1}", str(int(b)), float(c)) for i, (b, c) in enumerate(case.gen))
    arcs = tuple(
        Arc(f"L{i + 1}", str(int(f)), str(int(t)), float(arc_capacity)) for i, (f, t) in enumerate(case.branch)
    )
    loads = [int(b) for b, pd in case.bus if pd != 0]
    demands = tuple(Demand(f"D{b}", str(b), i + 1) for i, b in enumerate(loads))
    return Network(nodes, arcs, suppliers, demands, "MW")


# ------------------------------------------------------------ bundled cases

BUNDLED_CASES = ("unit-net", "three-node", "ieee14", "case141")


def case_text(filename: str) -> str:
    return resources.files("flexdesign.cases").joinpath(filename).read_text()


def load_case(name: str) -> NetworkConfig:
    """Bundled network with its Gaussian specification.

    The ``ieee14`` and ``case141`` network files were converted from the
    MATPOWER tables shipped alongside them (``case14.m``, ``case141.m``).
    """
    if name not in BUNDLED_CASES:
        raise KeyError(f"unknown bundled case {name!r}; choose from {', '.join(BUNDLED_CASES)}")
    return parse_network_file(case_text(f"{name}.flexnet"))


# ----------------------------------------------------------- sweep outputs

_SWEEP_HEADER = "# flexsweep 1"


def format_sweep(points: Sequence[ParetoPoint], times: bool = True) -> str:
    """One line per point: eps, cost, sf, time, optimal, status, design, y bits.

    With ``times=False`` the time field is written as ``-`` so repeated runs
    produce identical text.
    """
    lines = [_SWEEP_HEADER, "eps\tcost\tsf\ttime\toptimal\tmode\tstatus\tdesign\ty"]
    for p in points:
        design = "-" if p.design is None else ",".join(_fmt(v) for v in p.design.flat())
        y = "-" if p.y is None else "".join("1" if v else "0" for v in p.y)
        status = p.status.replace("\t", " ").replace("\n", " ") or "-"
        lines.append("\t".join([
            _fmt(p.eps),
            "nan" if not np.isfinite(p.cost) else repr(float(p.cost)),
            "nan" if not np.isfinite(p.sf) else repr(float(p.sf)),
            f"{p.time:.6f}" if times else "-",
            "yes" if p.optimal else "no",
            Mode(p.mode).value,
            status,
            design,
            y,
        ]))
    return "\n".join(lines) + "\n"


def parse_sweep(text: str, net: Network | None = None) -> list[ParetoPoint]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != _SWEEP_HEADER:
        raise FormatError("not a sweep file (bad header)", 1, 1)
    points = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        f = line.split("\t")
        if len(f) != 9:
            raise FormatError(f"expected 9 tab-separated fields, got {len(f)}", lineno, 1)
        try:
            eps, cst, sf = float(f[0]), float(f[1]), float(f[2])
            t = 0.0 if f[3] == "-" else float(f[3])
        except ValueError as exc:
            raise FormatError(str(exc), lineno, 1) from None
        design = None
        if f[7] != "-":
            vals = np.array([float(v) for v in f[7].split(",")])
            if net is not None:
                design = DesignVector.from_flat(net, vals)
            else:
                design = DesignVector(np.array([]), vals)
        y = None if f[8] == "-" else np.array([int(c) for c in f[8]], dtype=np.int8)
        points.append(ParetoPoint(eps, cst, sf, design, y, t, Mode(f[5]), f[4] == "yes", f[6]))
    return points


# ------------------------------------------------------------ result table

TABLE_COLUMNS = ("eps_c", "design_cost", "SF_K(%)", "SFbar_K(%)", "MIP_time(s)", "cont_time(s)",
                 "y_diff(%)", "MIP_optimal")


def _cell(v, fmt: str, scale: float = 1.0) -> str:
    if v is None:
        return "-"  # not computed for this table
    if not np.isfinite(v):
        return "nan"
    return format(scale * v, fmt)


def format_result_table(report: ComparisonReport, times: bool = True) -> str:
    """Tab-separated comparison table, one row per budget.

    Cells that were not computed (a single-mode sweep, or timings when
    ``times`` is false) hold ``-``.
    """
    lines = ["\t".join(TABLE_COLUMNS)]
    for r in report.rows:
        lines.append("\t".join([
            _fmt(r.eps),
            _cell(r.cost, ".6f"),
            _cell(r.sf_mip, ".4f", 100.0),
            _cell(r.sf_cont, ".4f", 100.0),
            _cell(r.time_mip if times else None, ".3f"),
            _cell(r.time_cont if times else None, ".3f"),
            _cell(r.y_diff_pct, ".4f"),
            "-" if r.sf_mip is None else ("yes" if r.mip_optimal else "no"),
        ]))
    return "\n".join(lines) + "\n"


def parse_result_table(text: str) -> list[dict]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or tuple(lines[0].split("\t")) != TABLE_COLUMNS:
        raise FormatError("unexpected table header", 1, 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        f = line.split("\t")
        if len(f) != len(TABLE_COLUMNS):
            raise FormatError(f"expected {len(TABLE_COLUMNS)} fields, got {len(f)}", lineno, 1)
        row = {}
        for name, v in zip(TABLE_COLUMNS, f):
            if name == "MIP_optimal":
                row[name] = None if v == "-" else v == "yes"
            else:
                row[name] = None if v == "-" else float(v)
        rows.append(row)
    return rows


# --------------------------------------------------------- manifest, plots


def write_manifest(path, manifest: dict) -> None:
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def plot_script(table_file: str, out_png: str = "pareto.png") -> str:
    """Stand-alone matplotlib script drawing SF against budget from a table."""
    return f'''"""Pareto front plot generated alongside {table_file}."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = [line.rstrip("\\n").split("\\t") for line in open({table_file!r})]
head, body = rows[0], rows[1:]
col = {{name: i for i, name in enumerate(head)}}
eps = [float(r[col["eps_c"]]) for r in body]
fig, ax = plt.subplots(figsize=(5, 3.5))
for name, label, style in (("SF_K(%)", "mixed-integer", "o-"), ("SFbar_K(%)", "continuous", "x--")):
    vals = [float(r[col[name]]) for r in body]
    if any(v == v for v in vals):
        ax.plot(eps, vals, style, label=label, ms=4)
ax.set_xlabel("cost budget")
ax.set_ylabel("sample flexibility (%)")
ax.legend()
fig.tight_layout()
fig.savefig({out_png!r}, dpi=150)
'''
