"""Fixed-field MPS export (and a reader for round-trip checks).

Rows and columns are written in model order under generated eight
character names (``R0000001``, ``C0000001``); binaries sit between
``INTORG``/``INTEND`` markers.  A constant objective term is written as the
negated right-hand side of the objective row, the usual MPS convention.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .lp import LinearProgram
from .milp import MixedIntegerProgram

__all__ = ["to_mps", "from_mps"]

_OBJ = "OBJ"
_SENSE = {"L": "L", "E": "E", "G": "G"}


def _num(v: float) -> str:
    """Shortest representation that fits the 12-character number field."""
    for digits in range(12, 0, -1):
        s = f"{v:.{digits}g}"
        if len(s) <= 12:
            return s
    raise ValueError(f"cannot encode {v} in 12 characters")


def _field_line(code: str, name1: str, name2: str = "", v2: float | None = None,
                name3: str = "", v3: float | None = None) -> str:
    line = f" {code:<2} {name1:<8}  {name2:<8}  "
    if v2 is not None:
        line += f"{_num(v2):>12}"
        if name3:
            line += f"   {name3:<8}  {_num(v3):>12}"
    return line.rstrip()


def _marker(k: int, kind: str) -> str:
    return f"    M{k + 1:07d}  'MARKER'{' ' * 17}'{kind}'"


def to_mps(problem: LinearProgram | MixedIntegerProgram, name: str = "FLEXDSGN") -> str:
    if isinstance(problem, MixedIntegerProgram):
        lp, binaries = problem.base, set(problem.binaries.tolist())
    else:
        lp, binaries = problem, set()
    m, n = lp.n_rows, lp.n_vars
    rname = [f"R{i + 1:07d}" for i in range(m)]
    cname = [f"C{j + 1:07d}" for j in range(n)]
    out = [f"NAME          {name[:8]}"]
    if lp.maximize:
        out += ["OBJSENSE", "    MAX"]
    out.append("ROWS")
    out.append(f" N  {_OBJ}")
    out += [f" {_SENSE[s]}  {r}" for s, r in zip(lp.senses, rname)]
    out.append("COLUMNS")
    A = sp.csc_matrix(lp.A)
    in_int = False
    marker = 0
    for j in range(n):
        is_bin = j in binaries
        if is_bin != in_int:
            out.append(_marker(marker, "INTORG" if is_bin else "INTEND"))
            marker += 1
            in_int = is_bin
        entries = []
        if lp.c[j] != 0:
            entries.append((_OBJ, lp.c[j]))
        lo, hi = A.indptr[j], A.indptr[j + 1]
        entries += [(rname[i], v) for i, v in zip(A.indices[lo:hi], A.data[lo:hi]) if v != 0]
        if not entries:
            entries = [(_OBJ, 0.0)]  # keep the column declared
        for k in range(0, len(entries), 2):
            pair = entries[k : k + 2]
            if len(pair) == 2:
                out.append(_field_line("", cname[j], pair[0][0], pair[0][1], pair[1][0], pair[1][1]))
            else:
                out.append(_field_line("", cname[j], pair[0][0], pair[0][1]))
    if in_int:
        out.append(_marker(marker, "INTEND"))
    out.append("RHS")
    rhs = [(r, v) for r, v in zip(rname, lp.b) if v != 0]
    if lp.offset != 0:
        rhs.insert(0, (_OBJ, -lp.offset))
    out += [_field_line("", "RHS", r, v) for r, v in rhs]
    out.append("BOUNDS")
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        c = cname[j]
        if np.isneginf(lo) and np.isposinf(hi):
            out.append(_field_line("FR", "BND", c))
            continue
        if np.isneginf(lo):
            out.append(_field_line("MI", "BND", c))
        elif lo != 0:
            out.append(_field_line("LO", "BND", c, lo))
        if np.isfinite(hi):
            out.append(_field_line("UP", "BND", c, hi))
    out.append("ENDATA")
    return "\n".join(out) + "\n"


def from_mps(text: str) -> MixedIntegerProgram:
    """Read MPS text written by :func:`to_mps` (a free-spacing reader)."""
    section = None
    maximize = False
    rows, senses = [], []
    cols: dict[str, int] = {}
    trip = []
    cost: dict[int, float] = {}
    rhs: dict[str, float] = {}
    offset = 0.0
    bounds = []
    binaries = []
    in_int = False
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            section = raw.split()[0]
            continue
        f = raw.split()
        if section == "OBJSENSE":
            maximize = f[0].upper() == "MAX"
        elif section == "ROWS":
            if f[0] != "N":
                rows.append(f[1])
                senses.append(f[0])
        elif section == "COLUMNS":
            if len(f) >= 3 and f[1] == "'MARKER'":
                in_int = f[2] == "'INTORG'"
                continue
            j = cols.setdefault(f[0], len(cols))
            if in_int and j not in binaries:
                binaries.append(j)
            for rn, v in zip(f[1::2], f[2::2]):
                if rn == _OBJ:
                    cost[j] = float(v)
                else:
                    trip.append((rn, j, float(v)))
        elif section == "RHS":
            for rn, v in zip(f[1::2], f[2::2]):
                if rn == _OBJ:
                    offset = -float(v)
                else:
                    rhs[rn] = float(v)
        elif section == "BOUNDS":
            bounds.append((f[0], f[2], float(f[3]) if len(f) > 3 else None))
    ridx = {r: i for i, r in enumerate(rows)}
    n = len(cols)
    c = np.zeros(n)
    for j, v in cost.items():
        c[j] = v
    lb, ub = np.zeros(n), np.full(n, np.inf)
    for kind, cn, v in bounds:
        j = cols[cn]
        if kind == "FR":
            lb[j], ub[j] = -np.inf, np.inf
        elif kind == "MI":
            lb[j] = -np.inf
        elif kind == "LO":
            lb[j] = v
        elif kind == "UP":
            ub[j] = v
    A = sp.csr_matrix(
        ([v for _, _, v in trip], ([ridx[r] for r, _, _ in trip], [j for _, j, _ in trip])),
        shape=(len(rows), n),
    )
    b = np.array([rhs.get(r, 0.0) for r in rows])
    lp = LinearProgram(c, A, senses, b, lb, ub, maximize=maximize, offset=offset)
    return MixedIntegerProgram(lp, np.array(binaries, dtype=int))
