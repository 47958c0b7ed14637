"""Print I^k, J^k and quotient dimensions for Heisenberg algebras and a few other groups."""

import argparse
from math import comb

from rumin.fibers import duality_pairing, ideal_I_fiber, ideal_J_fiber, lefschetz, rumin_fiber_dims
from rumin.graded import load_group


def group_table(name: str) -> None:
    g = load_group(name)
    print(f"{name}: N={g.dim} step={g.step} nu={g.homogeneous_dim}")
    print("  k  dim_I  dim_J  quotient")
    for k in range(g.dim + 1):
        i, j = len(ideal_I_fiber(g, k)), len(ideal_J_fiber(g, k))
        print(f"  {k:<2} {i:<6} {j:<6} {comb(g.dim, k) - i}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=4)
    parser.add_argument("--groups", nargs="*", default=["heisenberg:1+heisenberg:1", "engel", "abelian:3"])
    args = parser.parse_args()
    for n in range(1, args.max_n + 1):
        dims = rumin_fiber_dims(n)
        ranks = [lefschetz(n, k).rank for k in range(2 * n + 1)]
        dets = [duality_pairing(n, k).determinant for k in range(n + 1)]
        print(f"H_{n}: dims {' '.join(map(str, dims))} | Lefschetz ranks {ranks} | pairing dets {[str(d) for d in dets]}")
    for name in args.groups:
        group_table(name)


if __name__ == "__main__":
    main()
