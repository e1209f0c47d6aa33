"""Print the exponent table and check the discriminant sign pattern."""

import argparse

from mcelab import exponents as ex


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=20)
    args = ap.parse_args()
    print(ex.table_csv(ex.table(2, args.n_max)), end="")
    print()
    print("n,a_reg,discriminant_st,sign(n^2-12n+20)")
    for n in range(2, args.n_max + 1):
        print(f"{n},{ex.a_regularity(n):.6f},{ex.discriminant_st(n, ex.a_regularity(n)):+.3e},"
              f"{'+' if n * n - 12 * n + 20 > 0 else ('0' if n * n - 12 * n + 20 == 0 else '-')}")


if __name__ == "__main__":
    main()
