"""Rebuild the vendored NETLIB corpus and its reference optima.

AFIRO and ADLITTLE are copied verbatim from the HiGHS test instances
(shipped inside the `highs-sys` crate). The remaining instances are
written out as fixed-format MPS from the dense arrays distributed in
scipy's linprog benchmark suite (scipy-1.11.4 sdist,
benchmarks/benchmarks/linprog_benchmark_files/*.npz). Inequality rows
appear first (as L rows), then equality rows, in array order.

Reference optima are computed once with scipy.optimize.linprog (HiGHS)
on the arrays and cross-checked against the `obj` field of each archive.

usage: python3 derive.py <npz-dir> <highs-instances-dir>
"""
import shutil
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import linprog

NAMES = ["AFIRO", "ADLITTLE", "BLEND", "SC50A", "SC50B", "SC105", "SCAGR7", "SHARE2B"]
VERBATIM = {"AFIRO": "afiro.mps", "ADLITTLE": "adlittle.mps"}


def fmt(v):
    s = repr(float(v))
    if s.endswith(".0"):
        s = s[:-2]
    if len(s) > 12:
        s = "%.12g" % v
    return s


def write_mps(name, d, out):
    c, a_ub, b_ub, a_eq, b_eq = d["c"], d["A_ub"], d["b_ub"], d["A_eq"], d["b_eq"]
    rows = [("L", "R%04d" % (i + 1)) for i in range(a_ub.shape[0])]
    rows += [("E", "E%04d" % (i + 1)) for i in range(a_eq.shape[0])]
    a = np.vstack([a_ub, a_eq]) if a_eq.size else a_ub
    b = np.concatenate([b_ub, b_eq])
    lines = ["NAME          %s" % name, "ROWS", " N  COST"]
    lines += [" %s  %s" % (k, r) for k, r in rows]
    lines.append("COLUMNS")
    for j in range(a.shape[1]):
        col = "C%04d" % (j + 1)
        entries = []
        if c[j] != 0:
            entries.append(("COST", c[j]))
        entries += [(rows[i][1], a[i, j]) for i in range(a.shape[0]) if a[i, j] != 0]
        for rn, v in entries:
            lines.append("    %-8s  %-8s  %12s" % (col, rn, fmt(v)))
    lines.append("RHS")
    for i, (_, rn) in enumerate(rows):
        if b[i] != 0:
            lines.append("    %-8s  %-8s  %12s" % ("RHS", rn, fmt(b[i])))
    lines.append("ENDATA")
    out.write_text("\n".join(lines) + "\n")


def main():
    npz_dir, highs_dir = Path(sys.argv[1]), Path(sys.argv[2])
    here = Path(__file__).parent
    refs = []
    for name in NAMES:
        d = np.load(npz_dir / (name + ".npz"), allow_pickle=True)
        target = here / (name + ".mps")
        if name in VERBATIM:
            shutil.copy(highs_dir / VERBATIM[name], target)
        else:
            write_mps(name, d, target)
        res = linprog(d["c"], A_ub=d["A_ub"], b_ub=d["b_ub"],
                      A_eq=d["A_eq"] if d["A_eq"].size else None,
                      b_eq=d["b_eq"] if d["b_eq"].size else None,
                      bounds=(0, None), method="highs")
        assert res.status == 0, name
        assert abs(res.fun - float(d["obj"])) <= 1e-6 * max(1.0, abs(res.fun)), name
        refs.append("%s %.12g" % (name, res.fun))
    (here / "reference_objectives.txt").write_text(
        "# name optimal-objective (scipy.optimize.linprog/HiGHS on the source arrays)\n"
        + "\n".join(refs) + "\n")


if __name__ == "__main__":
    main()
