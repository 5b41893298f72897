"""Tabulate the admissible-level threshold lambda_alpha across alpha.

Three instances: a sublinear one (threshold grows with alpha), a superlinear
one (threshold shrinks), and a boundary instance with sup q = inf p whose
threshold is alpha-independent.
"""

import argparse

import numpy as np

from vexspec import (
    alpha_independent_threshold,
    exponent_field,
    interval_grid,
    lambda_alpha,
    make_problem,
)


def build(kind, n):
    grid = interval_grid(n, 1.0)
    x = grid.cell_midpoints()[0]
    m = grid.cell_shape
    if kind == "sublinear":
        p, q = np.full(m, 3.0), np.full(m, 2.0)
    elif kind == "superlinear":
        p, q = np.full(m, 2.0), np.full(m, 4.0)
    else:
        q = 2.0 - 0.5 * np.clip((0.2 - np.abs(x - 0.5)) / 0.08, 0.0, 1.0)
        p = 2.0 + 0.5 * np.clip((np.abs(x - 0.5) - 0.3) / 0.15, 0.0, 1.0)
    fields = [exponent_field(e) for e in (p, q, np.full(m, 400.0))]
    return make_problem(grid, *fields, np.ones(m))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=65, help="grid nodes")
    ap.add_argument("--points", type=int, default=12, help="alpha grid size")
    args = ap.parse_args()

    alphas = np.geomspace(0.05, 5.0, args.points)
    table = {kind: build(kind, args.n) for kind in ("sublinear", "superlinear", "boundary")}
    header = "alpha      " + "".join(f"{k:>14s}" for k in table)
    print(header)
    for a in alphas:
        row = f"{a:10.4f} "
        for pd in table.values():
            row += f"{lambda_alpha(pd, a):14.6e}"
        print(row)
    thr = alpha_independent_threshold(table["boundary"])
    print(f"\nboundary instance plateau: {thr:.12e}")


if __name__ == "__main__":
    main()
