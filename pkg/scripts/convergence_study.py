"""Convergence of E_inf with N for every registry example, as CSV on stdout."""

import argparse
import csv
import sys

from sgpm.analysis import convergence_sweep
from sgpm.problems import EXAMPLES, get_example


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=list(range(2, 17, 2)))
    ap.add_argument("--alpha", type=float, default=0.0)
    args = ap.parse_args(argv)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["example", "N", "Mt", "Linf", "rms", "seconds"])
    for ex in sorted(EXAMPLES):
        p = get_example(ex)
        res = convergence_sweep(p, p.exact, args.n, alpha=args.alpha)
        for r in res.successes():
            w.writerow([ex, r.N, r.mt, f"{r.report.Linf:.3e}", f"{r.report.rms:.3e}", f"{r.seconds:.4f}"])
    return 0


if __name__ == "__main__":
    sys.exit(main())
