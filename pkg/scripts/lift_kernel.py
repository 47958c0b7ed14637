"""Kernel of the middle-degree lift system: vertical corrections vs all of I^n.

With corrections in th[2n+1] ^ Lambda^{n-1} the homogeneous system has no
kernel.  Allowing all of I^n adds the closed forms d(f th[2n+1] ^ ...), whose
count grows with the polynomial degree bound, while d of the lift is unchanged.
"""

import argparse
import random

from rumin.forms import d_poly
from rumin.rumin import lift_system
from rumin.sampling import rand_rumin_form


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="*", default=[1, 2])
    parser.add_argument("--bounds", type=int, nargs="*", default=[1, 2, 3])
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    print("n  bound  unknowns_vertical  kernel_vertical  unknowns_ideal  kernel_ideal  same_d")
    for n in args.n:
        for bound in args.bounds:
            alpha = rand_rumin_form(rng, n, n, bound)
            while alpha.is_zero():
                alpha = rand_rumin_form(rng, n, n, bound)
            vert = lift_system(n, alpha, bound, space="full")
            ideal = lift_system(n, alpha, bound, space="full", corrections="ideal")
            same = d_poly(vert.form) == d_poly(ideal.form)
            print(f"{n}  {bound:<5}  {vert.unknowns:<17}  {vert.kernel_dim:<15}  {ideal.unknowns:<14}  "
                  f"{ideal.kernel_dim:<12}  {same}")


if __name__ == "__main__":
    main()
