"""Differential forms on boxes in H_n, written in the left-invariant coframe.

Coordinates are ``(x1, ..., x2n, t)`` and the coframe is

    th[j]    = dx_j                                   (j <= 2n)
    th[2n+1] = dt + 1/2 * sum_j (x_{2j-1} dx_{2j} - x_{2j} dx_{2j-1})

with dual frame ``X_{2j-1} = d/dx_{2j-1} + x_{2j}/2 d/dt``,
``X_{2j} = d/dx_{2j} - x_{2j-1}/2 d/dt``, ``X_{2n+1} = d/dt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Union

from rumin.exterior import (
    DegreeError,
    DimensionError,
    Form,
    Monomial,
    SubspaceBasis,
    _merge_sign,
    format_terms,
)
from rumin.graded import _d_monomial, make_heisenberg
from rumin.poly import Box, BumpPoly, Coefficient, Poly, _monomial_str, var_names

HALF = Fraction(1, 2)


def horizontal_derive(i: int, f: Coefficient, n: int) -> Coefficient:
    """Apply the left-invariant field ``X_i`` to a coefficient function."""
    dim = 2 * n + 1
    if f.nvars != dim:
        raise DimensionError(f"coefficient in {f.nvars} variables, H_{n} has {dim}")
    if not 1 <= i <= dim:
        raise DimensionError(f"frame index {i} outside 1..{dim}")
    t = dim - 1
    if i == dim:
        return f.derive(t)
    ft = f.derive(t)
    if i % 2:
        # X_{2j-1} = d/dx_{2j-1} + x_{2j}/2 d/dt
        return f.derive(i - 1) + ft.mul_var(i) * HALF
    return f.derive(i - 1) - ft.mul_var(i - 2) * HALF


def _zero_coeff(n: int) -> Poly:
    return Poly(2 * n + 1)


@dataclass(frozen=True, eq=False)
class PolyForm:
    """``sum_J f_J th_J`` with ``Poly`` or ``BumpPoly`` coefficients."""

    n: int
    degree: int
    terms: Mapping[Monomial, Coefficient] = field(default_factory=dict)

    def __post_init__(self) -> None:
        dim = 2 * self.n + 1
        clean = {}
        for m, f in self.terms.items():
            if f.is_zero():
                continue
            if len(m) != self.degree:
                raise DegreeError(f"monomial {m} in a degree-{self.degree} form")
            if f.nvars != dim:
                raise DimensionError(f"coefficient in {f.nvars} variables on H_{self.n}")
            clean[tuple(m)] = f
        object.__setattr__(self, "terms", clean)

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @classmethod
    def zero(cls, n: int, degree: int) -> "PolyForm":
        return cls(n, degree, {})

    @classmethod
    def function(cls, f: Coefficient, n: int) -> "PolyForm":
        return cls(n, 0, {(): f})

    @classmethod
    def from_invariant(cls, w: Form, n: int, coeff: Optional[Coefficient] = None) -> "PolyForm":
        """``coeff * w``; ``coeff`` defaults to the constant 1."""
        if w.dim != 2 * n + 1:
            raise DimensionError(f"invariant form over dimension {w.dim} on H_{n}")
        base = coeff if coeff is not None else Poly.const(2 * n + 1, 1)
        return cls(n, w.degree, {m: base * c for m, c in w.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def is_bump(self) -> bool:
        return any(isinstance(f, BumpPoly) for f in self.terms.values())

    def coefficient(self, mono) -> Coefficient:
        return self.terms.get(tuple(mono), _zero_coeff(self.n))

    def poly_degree(self) -> int:
        return max((f.degree() for f in self.terms.values() if isinstance(f, Poly)), default=0)

    def _check(self, other: "PolyForm") -> None:
        if self.n != other.n:
            raise DimensionError(f"forms on H_{self.n} and H_{other.n}")

    def __add__(self, other: "PolyForm") -> "PolyForm":
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.degree != other.degree:
            raise DegreeError(f"adding degree {self.degree} and {other.degree}")
        out = dict(self.terms)
        for m, f in other.terms.items():
            out[m] = out[m] + f if m in out else f
        return PolyForm(self.n, self.degree, out)

    def __neg__(self) -> "PolyForm":
        return PolyForm(self.n, self.degree, {m: -f for m, f in self.terms.items()})

    def __sub__(self, other: "PolyForm") -> "PolyForm":
        return self + (-other)

    def scale(self, c) -> "PolyForm":
        """Multiply every coefficient by a scalar or a ``Poly``."""
        return PolyForm(self.n, self.degree, {m: f * c for m, f in self.terms.items()})

    def __mul__(self, c) -> "PolyForm":
        if isinstance(c, (PolyForm, Form)):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __xor__(self, other) -> "PolyForm":
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyForm):
            return NotImplemented
        if other.is_zero() and self.is_zero():
            return self.n == other.n
        return (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)

    def at(self, point: Sequence) -> Form:
        """The invariant form obtained by freezing coefficients at ``point``."""
        return Form(self.dim, self.degree, {m: f.evaluate(point) for m, f in self.terms.items()})

    def map_coefficients(self, fn) -> "PolyForm":
        return PolyForm(self.n, self.degree, {m: fn(f) for m, f in self.terms.items()})

    def __str__(self) -> str:
        names = var_names(self.dim)
        items = []
        for m in sorted(self.terms):
            f = self.terms[m]
            th = "th[" + ",".join(map(str, m)) + "]" if m else ""
            if isinstance(f, Poly):
                for e, c in sorted(f.terms.items(), key=lambda kv: tuple(-x for x in kv[0])):
                    mono = _monomial_str(e, names)
                    items.append(("*".join(s for s in (mono, th) if s), c))
            else:
                items.append((f"({f})" + (f"*{th}" if th else ""), Fraction(1)))
        return format_terms(items, lambda label: label)

    def __repr__(self) -> str:
        return f"PolyForm(n={self.n}, {self})"


def as_polyform(w: Union[PolyForm, Form], n: int) -> PolyForm:
    return w if isinstance(w, PolyForm) else PolyForm.from_invariant(w, n)


def wedge(a: Union[PolyForm, Form], b: Union[PolyForm, Form]) -> PolyForm:
    n = a.n if isinstance(a, PolyForm) else b.n
    a, b = as_polyform(a, n), as_polyform(b, n)
    a._check(b)
    deg = a.degree + b.degree
    out: Dict[Monomial, Coefficient] = {}
    for ma, fa in a.terms.items():
        for mb, fb in b.terms.items():
            sign, m = _merge_sign(ma, mb)
            if not sign:
                continue
            prod = fa * fb
            if prod is NotImplemented:
                raise TypeError("cannot multiply two bump coefficients")
            prod = prod if sign > 0 else -prod
            out[m] = out[m] + prod if m in out else prod
    if deg > a.dim:
        return PolyForm.zero(n, deg)
    return PolyForm(n, deg, out)


def _d_theta(n: int, mono: Monomial) -> Form:
    return _d_monomial(make_heisenberg(n), mono)


def d_poly(w: PolyForm) -> PolyForm:
    """Exterior derivative: ``d(f th_J) = sum_i X_i f th_i ^ th_J + f d th_J``."""
    n, dim = w.n, w.dim
    out: Dict[Monomial, Coefficient] = {}

    def add(m, g):
        out[m] = out[m] + g if m in out else g

    for mono, f in w.terms.items():
        for i in range(1, dim + 1):
            sign, m = _merge_sign((i,), mono)
            if not sign:
                continue
            g = horizontal_derive(i, f, n)
            if not g.is_zero():
                add(m, g if sign > 0 else -g)
        for m, c in _d_theta(n, mono).terms.items():
            add(m, f * c)
    if w.degree + 1 > dim:
        return PolyForm.zero(n, w.degree + 1)
    return PolyForm(n, w.degree + 1, out)


def pointwise_reduce(w: PolyForm, basis: SubspaceBasis) -> PolyForm:
    """Reduce coefficientwise against a constant row-reduced basis."""
    if basis.degree != w.degree or basis.dim != w.dim:
        raise DegreeError("reducing against a basis of another degree")
    terms = dict(w.terms)
    for row in basis.rows:
        lead = row.leading()
        f = terms.get(lead)
        if f is None:
            continue
        for m, c in row.terms.items():
            g = f * (-c)
            if m in terms:
                s = terms[m] + g
                if s.is_zero():
                    del terms[m]
                else:
                    terms[m] = s
            else:
                terms[m] = g
    return PolyForm(w.n, w.degree, terms)


def theta_top(n: int) -> Form:
    from rumin.exterior import th

    return th(2 * n + 1, *range(1, 2 * n + 2))


def coframe_change_of_basis(n: int):
    """Matrix expressing ``th`` in ``(dx, dt)``; entries are ``Poly``.

    Row ``i`` holds the coordinate-coframe coefficients of ``th[i+1]``.  It is
    lower unitriangular, so ``th[1..N] = dx1 ^ ... ^ dx2n ^ dt``.
    """
    dim = 2 * n + 1
    rows = [[Poly.const(dim, 1 if a == b else 0) for b in range(dim)] for a in range(dim)]
    last = rows[-1]
    for j in range(1, n + 1):
        odd, even = 2 * j - 2, 2 * j - 1
        last[even] = Poly.var(dim, odd) * HALF
        last[odd] = -Poly.var(dim, even) * HALF
    return rows


def integrate_top(w: PolyForm, box: Box) -> Fraction:
    """Exact integral of a top-degree form over ``box``.

    Bump coefficients are integrated over their support, which must lie in
    ``box``.
    """
    if w.degree != w.dim:
        raise DegreeError(f"integrating a {w.degree}-form on a {w.dim}-manifold")
    if len(box) != w.dim:
        raise DimensionError("box dimension does not match")
    f = w.terms.get(tuple(range(1, w.dim + 1)))
    if f is None:
        return Fraction(0)
    return f.integrate(box)


def j_defect(w: PolyForm) -> tuple:
    """``(w ^ th[N], w ^ d th[N])``; both vanish exactly when ``w`` is J-valued."""
    g = make_heisenberg(w.n)
    top = g.dim
    return wedge(w, g.theta_higher()), wedge(w, g.dtheta[top])


def in_J(w: PolyForm) -> bool:
    a, b = j_defect(w)
    return a.is_zero() and b.is_zero()


def bump_form(w: Union[PolyForm, Form], support: Box, power: int = 2, n: Optional[int] = None) -> PolyForm:
    """Multiply a polynomial form by the bump anchored to ``support``."""
    if isinstance(w, Form):
        if n is None:
            n = (w.dim - 1) // 2
        w = PolyForm.from_invariant(w, n)
    return w.map_coefficients(lambda f: BumpPoly.from_poly(f, support, power))
