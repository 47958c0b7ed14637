"""Sweep the weak, pullback and chain identities over seeds and report residual statistics.

Besides the residual, each row counts instances whose integrals are nonzero,
so that a run of zeros cannot come from vanishing integrands alone.
"""

import argparse
import random
import time
from fractions import Fraction

from rumin.forms import d_poly, integrate_top, wedge
from rumin.pansu import pansu_pullback, rumin_chain_check, theorem_j_check
from rumin.poly import Box
from rumin.rumin import rumin_d, weak_identity_check
from rumin.sampling import rand_contact_map, rand_J_form, rand_rumin_form, rand_subbox, rand_test_form


def nonzero(draw):
    while True:
        w = draw()
        if not w.is_zero():
            return w


def weak(rng, n, k, box):
    beta = nonzero(lambda: rand_rumin_form(rng, n, k, 2))
    eta = rand_test_form(rng, n, 2 * n - k, 1, rand_subbox(rng, box), j_valued=k < n)
    res = weak_identity_check(n, k, beta, rumin_d(n, k, beta), eta, box)
    return res, integrate_top(wedge(beta, rumin_d(n, 2 * n - k, eta)), box)


def pullback(rng, n, k, box):
    f = rand_contact_map(rng, n)
    alpha = nonzero(lambda: rand_J_form(rng, n, k, 2))
    eta = rand_test_form(rng, n, 2 * n - k, 1, rand_subbox(rng, box), j_valued=False)
    return theorem_j_check(f, alpha, eta, box), integrate_top(wedge(pansu_pullback(f, d_poly(alpha)), eta), box)


def chain(rng, n, k, box):
    f = rand_contact_map(rng, n)
    alpha = nonzero(lambda: rand_rumin_form(rng, n, k, 2))
    eta = rand_test_form(rng, n, 2 * n - k, 1, rand_subbox(rng, box))
    res = rumin_chain_check(f, k, alpha, eta, box)
    return res, integrate_top(wedge(pansu_pullback(f, alpha), rumin_d(n, 2 * n - k, eta)), box)


CHECKS = {
    "weak": (weak, lambda n: range(2 * n + 1)),
    "pullback": (pullback, lambda n: range(n + 1, 2 * n + 1)),
    "chain": (chain, lambda n: range(2 * n + 1)),
}


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, nargs="*", default=[1, 2])
    parser.add_argument("--trials", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--checks", nargs="*", default=list(CHECKS), choices=list(CHECKS))
    args = parser.parse_args()
    rng = random.Random(args.seed)
    print("check     n  k  trials  nonzero_residuals  nonzero_integrals  seconds")
    for name in args.checks:
        fn, degrees = CHECKS[name]
        for n in args.n:
            box = Box(tuple((Fraction(-1), Fraction(1)) for _ in range(2 * n + 1)))
            for k in degrees(n):
                start = time.perf_counter()
                bad = live = 0
                for _ in range(args.trials):
                    res, lhs = fn(rng, n, k, box)
                    bad += res != 0
                    live += lhs != 0
                print(f"{name:<9} {n}  {k}  {args.trials:<6}  {bad:<17}  {live:<17}  {time.perf_counter() - start:.2f}")


if __name__ == "__main__":
    main()
