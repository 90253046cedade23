#!/usr/bin/env python3
"""Independent reference solve of a dumped LP (scipy linprog / HiGHS).

Usage: pathways dump-lp --dataset data/mini_be.json --lp-out lp.json
       python3 tests/oracles/solve_lp_reference.py lp.json

Prints status and the optimal objective; used once to freeze golden values
(tests/data/golden.json), kept for regeneration.
"""
import json
import sys

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import lil_matrix


def main(path: str) -> None:
    lp = json.load(open(path))
    nvars = len(lp["variables"])
    c = np.array([v["obj"] for v in lp["variables"]])
    bounds = [(v["lb"] if v["lb"] is not None else -np.inf,
               v["ub"] if v["ub"] is not None else np.inf) for v in lp["variables"]]

    ub_rows, ub_rhs, eq_rows, eq_rhs = [], [], [], []
    n_le = sum(1 for r in lp["rows"] if r["sense"] in ("le", "ge"))
    n_eq = sum(1 for r in lp["rows"] if r["sense"] == "eq")
    a_ub = lil_matrix((n_le, nvars))
    a_eq = lil_matrix((n_eq, nvars))
    iu = ie = 0
    for r in lp["rows"]:
        sgn = -1.0 if r["sense"] == "ge" else 1.0
        if r["sense"] == "eq":
            for col, val in r["entries"]:
                a_eq[ie, col] = val
            eq_rhs.append(r["rhs"])
            ie += 1
        else:
            for col, val in r["entries"]:
                a_ub[iu, col] = sgn * val
            ub_rhs.append(sgn * r["rhs"])
            iu += 1

    res = linprog(c, A_ub=a_ub.tocsr(), b_ub=np.array(ub_rhs),
                  A_eq=a_eq.tocsr(), b_eq=np.array(eq_rhs),
                  bounds=bounds, method="highs")
    print("status:", res.status, res.message.strip())
    if res.status == 0:
        print("objective: %.12g" % res.fun)


if __name__ == "__main__":
    main(sys.argv[1])
