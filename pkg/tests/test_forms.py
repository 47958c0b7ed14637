import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import bump_moment_sympy, coframe, coords, frame, polyform_to_coords, poly_to_sympy, cd, as_fraction
from rumin.exterior import DegreeError
from rumin.forms import (
    bump_form,
    coframe_change_of_basis,
    d_poly,
    horizontal_derive,
    in_J,
    integrate_top,
    wedge,
)
from rumin.literals import parse_poly, parse_poly_form
from rumin.poly import Box, BumpPoly, Poly, bump_moment
from rumin.sampling import rand_form, rand_J_form
from strategies import polys, poly_forms, seeds


# polynomials


@given(polys(3, 3, 4), polys(3, 3, 4))
def test_poly_ring_operations_match_sympy(p, q):
    P, Q = poly_to_sympy(p, 1), poly_to_sympy(q, 1)
    assert sympy.expand(poly_to_sympy(p * q, 1) - P * Q) == 0
    assert sympy.expand(poly_to_sympy(p - q, 1) - (P - Q)) == 0


@given(polys(3, 3, 4), st.integers(0, 2))
def test_poly_derivative_matches_sympy(p, v):
    assert sympy.expand(poly_to_sympy(p.derive(v), 1) - sympy.diff(poly_to_sympy(p, 1), coords(1)[v])) == 0


@given(polys(3, 2, 3), st.lists(polys(3, 2, 2), min_size=3, max_size=3))
def test_poly_compose_matches_substitution(p, subs):
    xs = coords(1)
    expected = poly_to_sympy(p, 1).subs({x: poly_to_sympy(s, 1) for x, s in zip(xs, subs)}, simultaneous=True)
    assert sympy.expand(poly_to_sympy(p.compose(subs), 1) - expected) == 0


@given(polys(3, 3, 4))
def test_poly_integral_matches_sympy(p):
    box = Box(((Fraction(-1), Fraction(1, 2)), (Fraction(0), Fraction(2)), (Fraction(1, 3), Fraction(1))))
    expr = poly_to_sympy(p, 1)
    for x, (a, b) in zip(coords(1), box.intervals):
        expr = sympy.integrate(expr, (x, sympy.Rational(str(a)), sympy.Rational(str(b))))
    assert p.integrate(box) == as_fraction(expr)


def test_poly_str_and_parse():
    p = parse_poly("x1^2*t - 3/2*x2 + 1", 3)
    assert p == Poly(3, {(2, 0, 1): 1, (0, 1, 0): Fraction(-3, 2), (0, 0, 0): 1})
    assert parse_poly(str(p), 3) == p


def test_box_parse_and_containment():
    box = Box.parse("[0,1]x[-1/2,2]")
    assert box.intervals == ((0, 1), (Fraction(-1, 2), 2))
    assert str(box) == "[0,1]x[-1/2,2]"
    assert box.contains_box(Box.parse("[0,1/2]x[0,1]"))
    assert not box.contains_box(Box.parse("[0,2]x[0,1]"))
    with pytest.raises(ValueError):
        Box.parse("[1,0]")


# bumps


def test_unit_bump_integral():
    # int_0^1 x^2 (1-x)^2 dx
    assert bump_moment(Fraction(0), Fraction(1), 2, 0, 0) == Fraction(1, 30)


@pytest.mark.parametrize("power", [2, 3])
@pytest.mark.parametrize("order", [0, 1, 2])
@pytest.mark.parametrize("m", [0, 1, 3])
def test_bump_moments_match_sympy(power, order, m):
    a, b = Fraction(-1, 2), Fraction(3, 2)
    assert bump_moment(a, b, power, order, m) == bump_moment_sympy(a, b, power, order, m)


def test_bump_derivative_of_constant_integrates_to_zero():
    box = Box.parse("[0,1]x[0,1]x[0,1]")
    f = BumpPoly.from_poly(Poly.const(3, 1), box, 3)
    for v in range(3):
        assert f.derive(v).integrate() == 0
    assert f.integrate() == Fraction(1, 140) ** 3


@given(polys(3, 2, 3), st.integers(0, 2))
def test_bump_expand_commutes_with_derive(p, v):
    box = Box.parse("[0,1]x[-1,1]x[0,2]")
    f = BumpPoly.from_poly(p, box, 3)
    assert f.derive(v).expand() == f.expand().derive(v)


# frame and coframe


def test_frame_examples():
    f = parse_poly("x2*t", 3)
    assert horizontal_derive(1, f, 1) == parse_poly("1/2*x2^2", 3)
    assert horizontal_derive(2, f, 1) == parse_poly("t - 1/2*x1*x2", 3)
    assert horizontal_derive(3, f, 1) == parse_poly("x2", 3)


@pytest.mark.parametrize("n", [1, 2])
def test_frame_and_coframe_are_dual(n):
    th_coords, vecs = coframe(n), frame(n)
    dim = 2 * n + 1
    for i in range(dim):
        for j in range(dim):
            pairing = sum(c * vecs[j][mono[0]] for mono, c in th_coords[i].items())
            assert sympy.simplify(pairing) == (1 if i == j else 0)


@pytest.mark.parametrize("n", [1, 2])
def test_horizontal_derive_is_the_oracle_frame(n):
    rng = random.Random(n)
    xs, vecs = coords(n), frame(n)
    for _ in range(5):
        f = Poly(2 * n + 1, {tuple(rng.randint(0, 2) for _ in xs): rng.randint(-3, 3) for _ in range(3)})
        F = poly_to_sympy(f, n)
        for i in range(2 * n + 1):
            expected = sum(c * sympy.diff(F, x) for c, x in zip(vecs[i], xs))
            assert sympy.expand(poly_to_sympy(horizontal_derive(i + 1, f, n), n) - expected) == 0


def test_change_of_basis_is_unitriangular():
    rows = coframe_change_of_basis(2)
    for i, row in enumerate(rows):
        assert row[i] == Poly.const(5, 1)
        assert all(c.is_zero() for c in row[i + 1:])


# exterior derivative


def test_d_poly_examples():
    assert d_poly(parse_poly_form("t", 1)) == parse_poly_form("1/2*x2*th[1] - 1/2*x1*th[2] + th[3]", 1)
    assert d_poly(parse_poly_form("x2*th[1,3]", 2)) == parse_poly_form("-th[1,2,3]", 2)
    assert d_poly(parse_poly_form("th[5]", 2)) == parse_poly_form("th[1,2] + th[3,4]", 2)


@pytest.mark.parametrize("n", [1, 2])
@given(data=st.data())
def test_d_poly_matches_coordinate_d(n, data):
    w = data.draw(poly_forms(n, data.draw(st.integers(0, 2 * n)), 2))
    assert polyform_to_coords(d_poly(w)) == cd(polyform_to_coords(w), n)


@pytest.mark.parametrize("n", [1, 2])
@given(data=st.data())
def test_d_squared_is_zero(n, data):
    w = data.draw(poly_forms(n, data.draw(st.integers(0, 2 * n - 1)), 3))
    assert d_poly(d_poly(w)).is_zero()


@given(poly_forms(1, 1, 2), poly_forms(1, 1, 2))
def test_d_poly_leibniz(a, b):
    assert d_poly(wedge(a, b)) == wedge(d_poly(a), b) - wedge(a, d_poly(b))


# integration


def test_integrate_top_examples():
    box = Box.unit(3)
    assert integrate_top(parse_poly_form("th[1,2,3]", 1), box) == 1
    assert integrate_top(parse_poly_form("x1*t*th[1,2,3]", 1), box) == Fraction(1, 4)
    with pytest.raises(DegreeError):
        integrate_top(parse_poly_form("th[1,2]", 1), box)


@given(seeds, st.sampled_from([1, 2]))
def test_stokes_for_bump_forms(seed, n):
    rng = random.Random(seed)
    dim = 2 * n + 1
    box = Box(tuple((Fraction(-1), Fraction(1)) for _ in range(dim)))
    w = bump_form(rand_form(rng, n, dim - 1, 2), box, 3)
    assert integrate_top(d_poly(w), box) == 0


def test_j_membership():
    assert in_J(parse_poly_form("x1*th[1,3]", 1))
    assert not in_J(parse_poly_form("th[1,2]", 1))
    rng = random.Random(3)
    assert in_J(rand_J_form(rng, 2, 4, 2))
