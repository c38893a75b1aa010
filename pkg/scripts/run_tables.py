"""Reproduce the criterion tables for Hermite and optimized bases.

For each criterion (projection in the L2 or H1 metric, weighted energy
error) this prints the value at N_b = 1..4 for the plain Hermite basis
and for the optimized basis started from it, together with the L-BFGS
iteration counts.
"""

import argparse
import csv
import sys

from basisopt.criteria import CriterionKind, eval_JA, eval_JE, make_criterion
from basisopt.galerkin import hbs_coefficients
from basisopt.grid import build_grid
from basisopt.reference import build_offline, default_measure
from basisopt.stiefel import minimize


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-points", type=int, default=1999)
    parser.add_argument("--x-max", type=float, default=20.0)
    parser.add_argument("--n-funcs", type=int, default=10)
    parser.add_argument("--cache", default=None, help="offline matrix cache dir")
    parser.add_argument("--csv", default=None, help="also write rows to this file")
    args = parser.parse_args(argv)

    grid = build_grid(args.x_max, args.n_points)
    measure = default_measure()
    offline = {
        metric: build_offline(grid, measure, args.n_funcs, metric, args.cache)
        for metric in ("L2", "H1")
    }

    rows = []
    for kind in CriterionKind:
        data = offline[kind.metric]
        evaluate = eval_JE if kind is CriterionKind.JE else eval_JA
        for n_basis in range(1, 5):
            hbs = hbs_coefficients(args.n_funcs, n_basis)
            baseline = evaluate(hbs, data)
            result = minimize(make_criterion(kind, data), hbs)
            rows.append(
                {
                    "criterion": kind.value,
                    "n_basis": n_basis,
                    "hbs": baseline,
                    "optimized": result.final_value,
                    "iterations": result.iterations,
                    "converged": result.converged,
                }
            )
            print(
                f"{kind.value:5s} N_b={n_basis}  HBS={baseline: .6e}  "
                f"OBS={result.final_value: .6e}  "
                f"iters={result.iterations}{'' if result.converged else ' (not converged)'}"
            )

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
