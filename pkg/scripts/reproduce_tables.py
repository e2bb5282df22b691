"""Error tables for the four registry examples, next to the published values."""

import argparse
import csv
import sys

import numpy as np

from sgpm.analysis import error_norms, rms_error
from sgpm.problems import get_example
from sgpm.telegraph import discretize, solve_problem

# (example, N, M_t) -> published E_inf, with RMS where one was given.
PUBLISHED_LINF = {
    (1, 4, 4): 1.332e-15,
    (2, 8, 8): 1.420e-9,
    (2, 10, 10): 4.222e-12,
    (2, 12, 12): 1.331e-14,
    (2, 14, 14): 1.697e-15,
    (3, 4, 4): 1.834e-4,
    (3, 4, 5): 8.060e-5,
    (3, 4, 6): 7.348e-5,
    (3, 6, 6): 1.160e-7,
    (4, 6, 6): 4.855e-6,
}
PUBLISHED_RMS = {(4, 4, 4): 6.382e-4, (4, 6, 6): 1.184e-6}
POINTWISE = {0.2: 1.220e-9, 0.4: 2.740e-10, 0.6: 2.740e-10, 0.8: 1.220e-9}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--csv", help="also write the rows to this file")
    args = ap.parse_args(argv)

    rows = []
    for key in sorted(set(PUBLISHED_LINF) | set(PUBLISHED_RMS)):
        ex, n, mt = key
        p = get_example(ex)
        field = solve_problem(p, discretize(n, n, mt))
        rep = error_norms(p.exact, field)
        rows.append([ex, n, mt, rep.Linf, PUBLISHED_LINF.get(key), rms_error(p.exact, field), PUBLISHED_RMS.get(key)])

    fmt = lambda v: "-" if v is None else f"{v:.3e}"
    print(f"{'ex':>2} {'N':>3} {'Mt':>3} {'E_inf':>10} {'published':>10} {'RMS':>10} {'published':>10}")
    for ex, n, mt, e, pe, r, pr in rows:
        print(f"{ex:>2} {n:>3} {mt:>3} {fmt(e):>10} {fmt(pe):>10} {fmt(r):>10} {fmt(pr):>10}")

    p = get_example(2)
    field = solve_problem(p, discretize(8, 8, 8))
    xs = np.array(sorted(POINTWISE))
    errs = np.abs(field(xs, 1.0) - p.exact(xs, 1.0))
    print("\nexample 2, N = M_t = 8, t = 1")
    for x, e in zip(xs, errs):
        print(f"  x = {x:.1f}  error = {e:.3e}  published = {POINTWISE[x]:.3e}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["example", "N", "Mt", "Linf", "Linf_published", "rms", "rms_published"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
