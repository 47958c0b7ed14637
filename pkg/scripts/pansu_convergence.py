"""Convergence of the difference-quotient Pansu differential on polynomial shears.

For a shear with quadratic profile the quotient error is exactly linear in
the scale; higher-degree profiles add s^2 terms that bend the fitted log-log
slope over 1e-1..1e-4 even though the asymptotic order stays 1.
"""

import argparse
import random
from fractions import Fraction

from rumin.pansu import ContactMap, convergence_order, distance, pansu_exact, pansu_numeric
from rumin.sampling import rand_fraction


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--degrees", type=int, nargs="*", default=[2, 3, 4])
    parser.add_argument("--samples", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    rng = random.Random(args.seed)
    print("profile_degree  min_order  max_order  max_extrapolated_error  max_error_at_1e-4")
    for degree in args.degrees:
        orders, extraps, finest = [], [], []
        for _ in range(args.samples):
            n = rng.randint(1, 2)
            coeffs = [Fraction(0)] + [rand_fraction(rng, nonzero=False) for _ in range(degree - 1)]
            coeffs.append(rand_fraction(rng))
            f = ContactMap.shear(n, rng.randint(1, n), coeffs)
            p = [rand_fraction(rng, nonzero=False) for _ in range(2 * n + 1)]
            exact = pansu_exact(f, p)
            num = pansu_numeric(f, p)
            errors = [distance(e, exact) for e in num.estimates]
            extraps.append(distance(num.extrapolated, exact))
            finest.append(errors[-1])
            if max(errors) > 1e-6:
                orders.append(convergence_order(num.scales, errors))
        print(f"{degree:<14}  {min(orders):<9.6f}  {max(orders):<9.6f}  {max(extraps):<22.3e}  {max(finest):.3e}")


if __name__ == "__main__":
    main()
