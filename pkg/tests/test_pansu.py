import math
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import coframe, coords, heis_mul_sympy, poly_to_sympy, pullback_theta_top
from rumin.forms import d_poly, in_J, integrate_top, wedge
from rumin.graded import check_graded_hom, j_hypothesis_check
from rumin.literals import parse_map, parse_poly, parse_poly_form
from rumin.pansu import (
    ContactError,
    ContactMap,
    HeisPoint,
    compose,
    contact_factor,
    convergence_order,
    dilate,
    distance,
    group_inv,
    group_mul,
    identity_point,
    pansu_exact,
    pansu_numeric,
    pansu_pullback,
    rumin_chain_check,
    theorem_j_check,
)
from rumin.poly import Box, Poly
from rumin.rumin import MembershipError, SupportError, rumin_d
from rumin.sampling import (
    rand_contact_map,
    rand_fraction,
    rand_J_form,
    rand_rumin_form,
    rand_subbox,
    rand_test_form,
)
from strategies import fractions, seeds


def points(n):
    return st.lists(fractions, min_size=2 * n + 1, max_size=2 * n + 1).map(HeisPoint.of)


# group law


def test_group_law_example():
    p = group_mul(HeisPoint.of([1, 0, 0]), HeisPoint.of([0, 1, 0]))
    assert p.coords() == (1, 1, Fraction(-1, 2))


@given(points(2), points(2), points(2))
def test_group_law_associative(a, b, c):
    assert group_mul(group_mul(a, b), c) == group_mul(a, group_mul(b, c))


@given(points(1))
def test_inverse_and_identity(a):
    e = identity_point(1)
    assert group_mul(a, group_inv(a)) == e == group_mul(group_inv(a), a)
    assert group_mul(a, e) == a


@given(points(2), fractions)
def test_center_is_the_t_axis(a, s):
    z = HeisPoint.of([0, 0, 0, 0, s])
    assert group_mul(a, z) == group_mul(z, a)


@given(points(1), points(1), st.sampled_from([Fraction(2), Fraction(-1, 3)]))
def test_dilation_is_an_automorphism(a, b, r):
    assert dilate(r, group_mul(a, b)) == group_mul(dilate(r, a), dilate(r, b))


def test_group_law_agrees_with_oracle():
    xs = coords(1)
    ys = sympy.symbols("y1 y2 s")
    got = group_mul(HeisPoint.of(xs), HeisPoint.of(list(ys))).coords()
    assert all(sympy.expand(u - v) == 0 for u, v in zip(got, heis_mul_sympy(xs, ys)))


@pytest.mark.parametrize("n", [1, 2])
def test_left_translation_preserves_contact_form(n):
    g = [Fraction(j + 1, 2) for j in range(2 * n + 1)]
    f = ContactMap.translation(g)
    comps = [poly_to_sympy(c, n) for c in f.components]
    assert pullback_theta_top(n, comps) == coframe(n)[-1]


# contact maps


def test_contact_factor_examples():
    assert contact_factor(ContactMap.dilation(1, 3)).lam == Poly.const(3, 9)
    assert contact_factor(ContactMap.shear(1, 1, [0, 0, 1])).lam == Poly.const(3, 1)
    bad = ContactMap.raw(1, [parse_poly("x1^2", 3), parse_poly("x2", 3), parse_poly("t", 3)])
    assert not contact_factor(bad).ok
    with pytest.raises(ContactError):
        ContactMap.checked(1, bad.components, "bad")


@given(seeds, st.sampled_from([1, 2]))
@settings(max_examples=20)
def test_random_maps_are_contact_per_oracle(seed, n):
    f = rand_contact_map(random.Random(seed), n)
    comps = [poly_to_sympy(c, n) for c in f.components]
    lam = poly_to_sympy(contact_factor(f).lam, n)
    expected = {k: sympy.expand(lam * v) for k, v in coframe(n)[-1].items()}
    assert pullback_theta_top(n, comps) == {k: v for k, v in expected.items() if v != 0}


def test_shear_formula():
    f = ContactMap.shear(1, 1, [0, 0, 1])
    # a shear along x2 by p(x1) = x1^2 adds -x1^3/6 to t
    assert f.components[1] == parse_poly("x2 + x1^2", 3)
    assert f.components[2] == parse_poly("t - 1/6*x1^3", 3)


@given(seeds, points(1))
@settings(max_examples=20)
def test_composition_evaluates_pointwise(seed, p):
    rng = random.Random(seed)
    f, g = rand_contact_map(rng, 1), rand_contact_map(rng, 1)
    assert compose(f, g)(p) == f(g(p))


def test_map_labels_round_trip():
    f = compose(ContactMap.shear(1, 1, [0, 0, 1]), ContactMap.dilation(1, 2))
    g = parse_map(f.label, 1)
    assert g.components == f.components


# exact Pansu differential


def test_pansu_exact_examples():
    d = pansu_exact(ContactMap.dilation(1, 2), [1, 1, 1])
    assert d.horizontal == ((2, 0), (0, 2)) and d.vertical == 4
    d = pansu_exact(ContactMap.shear(1, 1, [0, 0, 1]), [3, 0, 0])
    assert d.horizontal == ((1, 0), (6, 1)) and d.vertical == 1
    d = pansu_exact(ContactMap.translation([5, -1, 2]), [1, 2, 3])
    assert d.horizontal == ((1, 0), (0, 1)) and d.vertical == 1


@given(seeds, st.sampled_from([1, 2]))
@settings(max_examples=25)
def test_pansu_differential_is_a_graded_hom(seed, n):
    rng = random.Random(seed)
    f = rand_contact_map(rng, n)
    p = [rand_fraction(rng, nonzero=False) for _ in range(2 * n + 1)]
    d = pansu_exact(f, p)
    hom = d.as_hom()
    assert check_graded_hom(hom).valid
    result = j_hypothesis_check(hom)
    assert result.multiple and result.factor == contact_factor(f).lam.evaluate(p)


# numeric Pansu differential


def test_numeric_matches_exact_on_a_shear():
    f = ContactMap.shear(1, 1, [0, 1, Fraction(1, 2)])
    p = [Fraction(1, 2), Fraction(-1), Fraction(1, 3)]
    num = pansu_numeric(f, p)
    assert num.converged
    assert distance(num.extrapolated, pansu_exact(f, p)) <= 1e-6
    errs = [distance(e, pansu_exact(f, p)) for e in num.estimates]
    assert convergence_order(num.scales, errs) >= 1 - 1e-6


def _random_shear(rng, profile_degree):
    n = rng.randint(1, 2)
    coeffs = [Fraction(0)] + [rand_fraction(rng, nonzero=False) for _ in range(profile_degree - 1)]
    f = ContactMap.shear(n, rng.randint(1, n), coeffs + [rand_fraction(rng)])
    return f, [rand_fraction(rng, nonzero=False) for _ in range(2 * n + 1)]


@given(seeds)
@settings(max_examples=30)
def test_richardson_gains_a_factor_ten(seed):
    f, p = _random_shear(random.Random(seed), 2)
    exact = pansu_exact(f, p)
    num = pansu_numeric(f, p, scales=(1e-3, 5e-4))
    coarse = distance(num.estimates[0], exact)
    assert distance(num.extrapolated, exact) <= max(coarse / 10, 1e-6)


@given(seeds)
@settings(max_examples=30)
def test_richardson_is_second_order_for_cubic_profiles(seed):
    # the quotient error is a*s + b*s^2 here; extrapolation leaves the s^2 part
    f, p = _random_shear(random.Random(seed), 3)
    exact = pansu_exact(f, p)
    wide = distance(pansu_numeric(f, p, scales=(1e-2, 5e-3)).extrapolated, exact)
    narrow = distance(pansu_numeric(f, p, scales=(1e-3, 5e-4)).extrapolated, exact)
    assert narrow <= max(wide / 50, 1e-9)


def test_numeric_on_a_linear_map_is_exact_up_to_rounding():
    f = ContactMap.dilation(1, 3)
    num = pansu_numeric(f, [1, 2, 3])
    assert num.converged
    assert max(distance(e, pansu_exact(f, [1, 2, 3])) for e in num.estimates) < 1e-6


def test_numeric_accepts_plain_functions():
    def f(p):
        return dilate(2.0, p)

    num = pansu_numeric(f, [0.0, 0.0, 0.0])
    assert abs(num.extrapolated.vertical - 4) < 1e-9


def test_numeric_rejects_bad_scales():
    with pytest.raises(ValueError):
        pansu_numeric(ContactMap.identity(1), [0, 0, 0], scales=[1e-2, 1e-1])


def test_convergence_order_of_a_power_law():
    scales = [1e-1, 1e-2, 1e-3]
    assert math.isclose(convergence_order(scales, [s**2 for s in scales]), 2.0)


# Pansu pullback


def test_pullback_examples():
    f = ContactMap.dilation(1, 2)
    assert pansu_pullback(f, parse_poly_form("t*th[3]", 1)) == parse_poly_form("16*t*th[3]", 1)
    g = ContactMap.shear(1, 1, [0, 0, 1])
    assert pansu_pullback(g, parse_poly_form("th[2]", 1)) == parse_poly_form("2*x1*th[1] + th[2]", 1)


@given(seeds, st.sampled_from([1, 2]), st.data())
@settings(max_examples=20)
def test_pullback_is_functorial(seed, n, data):
    rng = random.Random(seed)
    f, g = rand_contact_map(rng, n), rand_contact_map(rng, n)
    w = rand_rumin_form(rng, n, data.draw(st.integers(0, 2 * n + 1)), 1)
    assert pansu_pullback(compose(f, g), w) == pansu_pullback(g, pansu_pullback(f, w))


@given(seeds, st.sampled_from([1, 2]), st.data())
@settings(max_examples=20)
def test_pullback_preserves_J(seed, n, data):
    rng = random.Random(seed)
    f = rand_contact_map(rng, n)
    w = rand_J_form(rng, n, data.draw(st.integers(n + 1, 2 * n + 1)), 2)
    assert in_J(pansu_pullback(f, w))


# integral identities


BOX1 = Box.parse("[-1,1]x[-1,1]x[-1,1]")


def test_dilation_degree_zero_chain():
    f = ContactMap.dilation(1, 2)
    rng = random.Random(0)
    for _ in range(5):
        eta = rand_test_form(rng, 1, 2, 1, rand_subbox(rng, BOX1))
        assert rumin_chain_check(f, 0, parse_poly_form("x1", 1), eta, BOX1) == 0


@pytest.mark.parametrize("n,k", [(1, 2), (2, 3), (2, 4)])
@given(seeds)
@settings(max_examples=10)
def test_theorem_j_identity(n, k, seed):
    rng = random.Random(seed)
    box = Box(tuple((Fraction(-1), Fraction(1)) for _ in range(2 * n + 1)))
    f = rand_contact_map(rng, n)
    alpha = rand_J_form(rng, n, k, 2)
    eta = rand_test_form(rng, n, 2 * n - k, 1, rand_subbox(rng, box), j_valued=False)
    assert theorem_j_check(f, alpha, eta, box) == 0


@pytest.mark.parametrize("n,k", [(1, 0), (1, 1), (1, 2), (2, 2)])
@given(seeds)
@settings(max_examples=8)
def test_chain_identity(n, k, seed):
    rng = random.Random(seed)
    box = Box(tuple((Fraction(-1), Fraction(1)) for _ in range(2 * n + 1)))
    f = rand_contact_map(rng, n)
    alpha = rand_rumin_form(rng, n, k, 2)
    eta = rand_test_form(rng, n, 2 * n - k, 1, rand_subbox(rng, box))
    assert rumin_chain_check(f, k, alpha, eta, box) == 0


def test_chain_check_detects_a_wrong_differential():
    # replacing d_1 by plain d breaks the identity for a non-lifted alpha
    f = ContactMap.shear(1, 1, [0, 1, 1])
    alpha = parse_poly_form("t*th[1]", 1)
    rng = random.Random(5)
    residuals = []
    for _ in range(10):
        eta = rand_test_form(rng, 1, 1, 1, rand_subbox(rng, BOX1))
        lhs = rumin_chain_check(f, 1, alpha, eta, BOX1)
        honest = integrate_top(wedge(pansu_pullback(f, rumin_d(1, 1, alpha)), eta), BOX1)
        naive = integrate_top(wedge(pansu_pullback(f, d_poly(alpha)), eta), BOX1)
        residuals.append((lhs, honest - naive))
    assert all(r == 0 for r, _ in residuals)
    assert any(gap != 0 for _, gap in residuals)


def test_checks_validate_inputs():
    f = ContactMap.identity(1)
    with pytest.raises(MembershipError):
        theorem_j_check(f, parse_poly_form("th[1,2]", 1), parse_poly_form("0", 1), BOX1)
    with pytest.raises(SupportError):
        rumin_chain_check(f, 1, parse_poly_form("th[1]", 1), parse_poly_form("th[1]", 1), BOX1)
