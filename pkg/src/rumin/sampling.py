"""Seeded random instances: polynomials, Rumin forms, bump test forms, contact maps.

Every generator takes a ``random.Random`` so that a single seed reproduces a
whole batch of trials.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Sequence

from rumin.exterior import AlgebraMap, Form, monomials, th
from rumin.fibers import ideal_J_fiber, rumin_fiber
from rumin.forms import PolyForm, bump_form
from rumin.graded import GradedHom, make_heisenberg
from rumin.pansu import ContactMap, compose, symplectic_matrix
from rumin.poly import Box, Poly
from rumin.rumin import I_basis

SMALL = tuple(Fraction(p, q) for p in range(-3, 4) for q in (1, 2, 3) if p)

# test forms vanish to third order at the boundary of their support,
# enough for the second-order middle differential
TEST_BUMP_POWER = 3


def rand_fraction(rng: random.Random, nonzero: bool = True) -> Fraction:
    if nonzero:
        return rng.choice(SMALL)
    return rng.choice(SMALL + (Fraction(0),))


def rand_exponent(rng: random.Random, nvars: int, degree: int) -> tuple:
    total = rng.randint(0, degree)
    e = [0] * nvars
    for _ in range(total):
        e[rng.randrange(nvars)] += 1
    return tuple(e)


def rand_poly(rng: random.Random, nvars: int, degree: int, nterms: int = 3) -> Poly:
    terms = {}
    for _ in range(nterms):
        e = rand_exponent(rng, nvars, degree)
        terms[e] = terms.get(e, Fraction(0)) + rand_fraction(rng)
    return Poly(nvars, terms)


def rand_combination(rng: random.Random, n: int, rows: Sequence[Form], degree: int,
                     nterms: int = 2) -> PolyForm:
    """``sum_r f_r * rows[r]`` with random polynomial ``f_r``."""
    dim = 2 * n + 1
    k = rows[0].degree if rows else 0
    out = PolyForm.zero(n, k)
    for row in rows:
        if rng.random() < 0.6:
            out = out + PolyForm.from_invariant(row, n, rand_poly(rng, dim, degree, nterms))
    return out


def rand_form(rng: random.Random, n: int, k: int, degree: int, nterms: int = 2) -> PolyForm:
    """A polynomial ``k``-form with coefficients on random coframe monomials."""
    dim = 2 * n + 1
    monos = monomials(dim, k)
    picks = rng.sample(monos, min(len(monos), rng.randint(1, 3)))
    return rand_combination(rng, n, [th(dim, *m) for m in picks], degree, nterms)


def rand_I_element(rng: random.Random, n: int, k: int, degree: int) -> PolyForm:
    return rand_combination(rng, n, I_basis(n, k).rows, degree)


def rand_J_form(rng: random.Random, n: int, k: int, degree: int) -> PolyForm:
    return rand_combination(rng, n, ideal_J_fiber(make_heisenberg(n), k).rows, degree)


def rand_rumin_form(rng: random.Random, n: int, k: int, degree: int) -> PolyForm:
    """Canonical representative for ``k <= n``, J-valued form for ``k > n``."""
    return rand_combination(rng, n, rumin_fiber(n, k).basis, degree)


def rand_box(rng: random.Random, nvars: int) -> Box:
    out = []
    for _ in range(nvars):
        a = Fraction(rng.randint(-2, 1), rng.choice((1, 2)))
        out.append((a, a + Fraction(rng.randint(1, 3), rng.choice((1, 2)))))
    return Box(tuple(out))


def rand_subbox(rng: random.Random, box: Box, grid: int = 4) -> Box:
    """Random box inside ``box`` with endpoints on a ``1/grid`` lattice of each side."""
    out = []
    for a, b in box.intervals:
        i, j = sorted(rng.sample(range(grid + 1), 2))
        step = (b - a) / grid
        out.append((a + i * step, a + j * step))
    return Box(tuple(out))


def rand_test_form(rng: random.Random, n: int, m: int, degree: int, support: Box,
                   j_valued: Optional[bool] = None) -> PolyForm:
    """Nonzero compactly supported ``m``-form; J-valued by default when ``m > n``."""
    if j_valued is None:
        j_valued = m > n
    for _ in range(50):
        base = rand_J_form(rng, n, m, degree) if j_valued else rand_form(rng, n, m, degree)
        if not base.is_zero():
            return bump_form(base, support, TEST_BUMP_POWER)
    raise RuntimeError(f"no nonzero {m}-form found")


# contact maps


def rand_symplectic(rng: random.Random, n: int, transvections: int = 3) -> List[List[Fraction]]:
    """Product of transvections ``x -> x + c omega(v, x) v``."""
    size = 2 * n
    om = symplectic_matrix(n)
    a = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
    for _ in range(transvections):
        v = [Fraction(rng.randint(-1, 1)) for _ in range(size)]
        if not any(v):
            v[rng.randrange(size)] = Fraction(1)
        c = rand_fraction(rng)
        w = [sum(v[i] * om[i][j] for i in range(size)) for j in range(size)]  # omega(v, .)
        t = [[Fraction(int(i == j)) + c * v[i] * w[j] for j in range(size)] for i in range(size)]
        a = [[sum(t[i][k] * a[k][j] for k in range(size)) for j in range(size)] for i in range(size)]
    return a


def rand_shear(rng: random.Random, n: int, degree: int = 2) -> ContactMap:
    coeffs = [Fraction(0)] + [rand_fraction(rng, nonzero=False) for _ in range(degree)]
    if not any(coeffs):
        coeffs[-1] = Fraction(1)
    return ContactMap.shear(n, rng.randint(1, n), coeffs)


def rand_contact_map(rng: random.Random, n: int) -> ContactMap:
    """Translation, dilation, linear symplectic map and shear, randomly composed."""
    point = [rand_fraction(rng, nonzero=False) for _ in range(2 * n + 1)]
    pieces = [
        ContactMap.translation(point),
        ContactMap.dilation(n, rng.choice((Fraction(1, 2), Fraction(2), Fraction(-1), Fraction(3, 2)))),
        ContactMap.linear_symplectic(rand_symplectic(rng, n, rng.randint(1, 2))),
        rand_shear(rng, n, rng.randint(1, 2)),
    ]
    rng.shuffle(pieces)
    return compose(*pieces[: rng.randint(1, len(pieces))])


# graded endomorphisms of the Heisenberg algebra


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def rand_endomorphism(rng: random.Random, n: int, degenerate: Optional[bool] = None) -> GradedHom:
    """A valid graded endomorphism of h_n.

    Nondegenerate: conformally symplectic horizontal block, vertical scalar its
    multiplier.  Degenerate: horizontal image inside a Lagrangian subspace and
    vertical scalar 0.
    """
    if degenerate is None:
        degenerate = rng.random() < 0.25
    size = 2 * n
    sp = rand_symplectic(rng, n, rng.randint(1, 3))
    if degenerate:
        raw = [[rand_fraction(rng, nonzero=False) for _ in range(size)] for _ in range(size)]
        # keep rows that land in span{e1, e3, ...}, which is Lagrangian
        flat = [raw[i] if i % 2 == 0 else [Fraction(0)] * size for i in range(size)]
        block, mu = _matmul(sp, flat), Fraction(0)
    else:
        r = rng.choice(SMALL)
        block, mu = [[r * v for v in row] for row in sp], r * r
    matrix = [row + [Fraction(0)] for row in block] + [[Fraction(0)] * size + [mu]]
    h = make_heisenberg(n)
    return GradedHom(h, h, AlgebraMap.from_matrix(matrix))
