"""Run the slab counterexample pipeline over a grid of (a, n) and tabulate margins."""

import argparse
import time

import numpy as np

from mcelab.inequality_lab import counterexample_verify


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, nargs="+", default=list(np.round(np.arange(0.55, 0.96, 0.05), 2)))
    ap.add_argument("--n", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    print("a,n,passed,worst_check,worst_margin,seconds")
    for a in args.a:
        for n in args.n:
            t0 = time.perf_counter()
            rep = counterexample_verify(float(a), n, seed=args.seed)
            worst = min(rep.checks, key=lambda c: c.margin + c.tol)
            print(f"{a},{n},{rep.passed},{worst.check_id},{worst.margin:.3e},{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
