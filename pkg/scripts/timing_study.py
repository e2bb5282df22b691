"""Wall time against the number of unknowns L + 1 = (N + 1)^2.

Solves example 2 for N = 8..40 (step 2) with M_t = min(N, 8), averages
``--repeats`` runs per N after one warm-up solve, and fits the log-log slope.
Writes a plot-ready CSV when ``--csv`` is given.
"""

import argparse
import csv
import sys
import time

import numpy as np

from sgpm.analysis import fit_slope
from sgpm.problems import get_example
from sgpm.telegraph import assemble, discretize, solve, solve_problem


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--example", type=int, default=2)
    ap.add_argument("--start", type=int, default=8)
    ap.add_argument("--stop", type=int, default=40)
    ap.add_argument("--step", type=int, default=2)
    ap.add_argument("--mt-cap", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)

    p = get_example(args.example)
    solve_problem(p, discretize(args.start, args.start, min(args.start, args.mt_cap)))
    ns = list(range(args.start, args.stop + 1, args.step))
    print(f"{'N':>3} {'L+1':>6} {'disc_s':>9} {'assemble_s':>10} {'lu_s':>9} {'total_s':>9}")
    # Repeats are full passes over N so that machine drift hits every N alike.
    runs = np.zeros((args.repeats, len(ns), 3))
    for r in range(args.repeats):
        for i, n in enumerate(ns):
            disc, t_disc = timed(discretize, n, n, min(n, args.mt_cap))
            system, t_asm = timed(assemble, p, disc)
            _, t_lu = timed(solve, system)
            runs[r, i] = t_disc, t_asm, t_lu
    rows = []
    for n, (d, a, s) in zip(ns, runs.mean(axis=0)):
        rows.append([n, (n + 1) ** 2, d, a, s, d + a + s])
        print(f"{n:>3} {(n + 1) ** 2:>6} {d:>9.4f} {a:>10.4f} {s:>9.4f} {d + a + s:>9.4f}")

    logl = np.log([r[1] for r in rows])
    print(f"\nslope of log(total) vs log(L+1): {fit_slope(logl, np.log([r[5] for r in rows])):.2f}")
    print(f"slope of log(assemble + LU) vs log(L+1): {fit_slope(logl, np.log([r[3] + r[4] for r in rows])):.2f}")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["N", "L_plus_1", "discretize_s", "assemble_s", "solve_s", "total_s"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
