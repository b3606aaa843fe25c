#!/usr/bin/env python3
"""Solve an MPS file with scipy's HiGHS backend.

Usage: mps_solve.py model.mps solution.out

The solution file holds one "name value" line per variable plus the
pseudo-entries __status__ and __objective__.
"""

import sys

import numpy as np
from scipy import optimize, sparse

INF = float("inf")


def parse_mps(path):
    rows = {}  # name -> (sense, order)
    row_order = []
    obj_name = None
    cols = {}  # name -> {row: coeff}
    col_order = []
    integer = set()
    rhs = {}
    bounds = {}  # name -> [lo, up]
    section = None
    in_integer = False

    with open(path) as f:
        for line in f:
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            tok = line.split()
            if section == "ROWS":
                sense, name = tok[0], tok[1]
                if sense == "N":
                    obj_name = name
                else:
                    rows[name] = sense
                    row_order.append(name)
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    in_integer = tok[2] == "'INTORG'"
                    continue
                name = tok[0]
                if name not in cols:
                    cols[name] = {}
                    col_order.append(name)
                    if in_integer:
                        integer.add(name)
                for rname, val in zip(tok[1::2], tok[2::2]):
                    cols[name][rname] = float(val)
            elif section == "RHS":
                for rname, val in zip(tok[1::2], tok[2::2]):
                    rhs[rname] = float(val)
            elif section == "BOUNDS":
                btype, name = tok[0], tok[2]
                b = bounds.setdefault(name, [0.0, INF])
                if btype == "FX":
                    b[0] = b[1] = float(tok[3])
                elif btype == "FR":
                    b[0], b[1] = -INF, INF
                elif btype == "MI":
                    b[0] = -INF
                elif btype == "LO":
                    b[0] = float(tok[3])
                elif btype == "UP":
                    b[1] = float(tok[3])
                else:
                    raise ValueError(f"unsupported bound type {btype}")
    return obj_name, rows, row_order, cols, col_order, integer, rhs, bounds


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 1
    obj_name, rows, row_order, cols, col_order, integer, rhs, bounds = parse_mps(sys.argv[1])

    n = len(col_order)
    col_index = {name: i for i, name in enumerate(col_order)}
    row_index = {name: i for i, name in enumerate(row_order)}
    c = np.zeros(n)
    data, ri, ci = [], [], []
    for name, entries in cols.items():
        j = col_index[name]
        for rname, val in entries.items():
            if rname == obj_name:
                c[j] = val
            else:
                data.append(val)
                ri.append(row_index[rname])
                ci.append(j)
    a = sparse.csr_matrix((data, (ri, ci)), shape=(len(row_order), n))

    lower = np.full(len(row_order), -INF)
    upper = np.full(len(row_order), INF)
    for name in row_order:
        i = row_index[name]
        b = rhs.get(name, 0.0)
        sense = rows[name]
        if sense in ("L", "E"):
            upper[i] = b
        if sense in ("G", "E"):
            lower[i] = b
    var_lo = np.array([bounds.get(name, [0.0, INF])[0] for name in col_order])
    var_up = np.array([bounds.get(name, [0.0, INF])[1] for name in col_order])
    integrality = np.array([1 if name in integer else 0 for name in col_order])

    res = optimize.milp(
        c,
        constraints=optimize.LinearConstraint(a, lower, upper),
        bounds=optimize.Bounds(var_lo, var_up),
        integrality=integrality,
        options={"mip_rel_gap": 1e-9, "presolve": True},
    )

    obj_shift = -rhs.get(obj_name, 0.0)
    with open(sys.argv[2], "w") as out:
        if res.status == 0:
            out.write("__status__ optimal\n")
            out.write(f"__objective__ {res.fun + obj_shift:.17g}\n")
            for name, val in zip(col_order, res.x):
                out.write(f"{name} {val:.17g}\n")
        elif res.status == 2:
            out.write("__status__ infeasible\n")
        elif res.status == 3:
            out.write("__status__ unbounded\n")
        else:
            out.write("__status__ time_limit\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
