"""Mesh study of the reduced slab eigenvalue on (-r0, r0).

The weight (1+z)^(-3/2) vanishes like |x1|^(3a) at the singular plane, so
for a > 2/3 the continuum infimum of the reduced form is 0 and is not
attained; the discrete minimum eigenvalue decays slowly toward it.
"""

import argparse

from mcelab.inequality_lab import compute_r0, lambda_star
from mcelab.nonlinearity import CounterexampleF
from mcelab.radial_solver import SlabProfile
from mcelab.stability import min_eigenvalue_slab


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, nargs="+", default=[0.7, 0.75, 0.9])
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--meshes", type=int, nargs="+", default=[500, 1000, 2000, 4000, 8000])
    args = ap.parse_args()
    print("a,r0,mesh,min_eigenvalue")
    for a in args.a:
        r0 = compute_r0(a, lambda_star(a))[1]
        for m in args.meshes:
            rep = min_eigenvalue_slab(SlabProfile(args.n, a), CounterexampleF(a), r0, m=m)
            print(f"{a},{r0:.6g},{m},{rep.min_eigenvalue:.6g}")


if __name__ == "__main__":
    main()
