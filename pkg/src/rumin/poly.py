"""Exact coefficient functions on boxes of ``R^N``.

``Poly`` is an ordinary sparse polynomial with ``Fraction`` coefficients.

``BumpPoly`` is a finite sum of terms ``c * x^m * prod_v B_v^(e_v)(x_v)`` where
``B_v(x) = u^p (1-u)^p`` with ``u = (x - a_v)/(b_v - a_v)`` on ``[a_v, b_v]`` and
zero elsewhere.  Derivatives act on the key ``(e, m)`` formally, so the bump is
never expanded; integrals factor into cached one-dimensional moments.  With
``p = 2`` the bump is C^1, with ``p = 3`` it is C^2.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

Exp = Tuple[int, ...]
Scalar = Union[int, Fraction]


def var_names(nvars: int) -> List[str]:
    if nvars == 1:
        return ["x"]
    return [f"x{i}" for i in range(1, nvars)] + ["t"]


def _monomial_str(m: Exp, names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _fmt(items) -> str:
    from rumin.exterior import format_terms

    return format_terms(items, lambda label: label)


class Poly:
    """Sparse multivariate polynomial over Q."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Optional[Dict[Exp, Scalar]] = None):
        self.nvars = nvars
        clean: Dict[Exp, Fraction] = {}
        for m, c in (terms or {}).items():
            if c:
                if len(m) != nvars:
                    raise ValueError(f"exponent {m} for {nvars} variables")
                clean[m] = Fraction(c)
        self.terms = clean

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exp, Fraction]) -> "Poly":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def const(cls, nvars: int, c: Scalar) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, v: int) -> "Poly":
        e = [0] * nvars
        e[v] = 1
        return cls(nvars, {tuple(e): 1})

    def zero_like(self) -> "Poly":
        return Poly._raw(self.nvars, {})

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.nvars, other)
        if not isinstance(other, Poly):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.zero_like()
            s = Fraction(other)
            return Poly._raw(self.nvars, {m: s * c for m, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: Dict[Exp, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = tuple(x + y for x, y in zip(ma, mb))
                out[m] = out.get(m, 0) + ca * cb
        return Poly._raw(self.nvars, {m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, k: int) -> "Poly":
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def derive(self, v: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            if m[v]:
                e = list(m)
                e[v] -= 1
                out[tuple(e)] = c * m[v]
        return Poly._raw(self.nvars, out)

    def mul_var(self, v: int) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            e = list(m)
            e[v] += 1
            out[tuple(e)] = c
        return Poly._raw(self.nvars, out)

    def compose(self, subs: Sequence["Poly"]) -> "Poly":
        """Substitute ``subs[v]`` for variable ``v``."""
        if len(subs) != self.nvars:
            raise ValueError("wrong number of substitutions")
        nv = subs[0].nvars if subs else 0
        powers: List[List[Poly]] = [[Poly.const(nv, 1)] for _ in subs]
        out = Poly(nv)
        for m, c in self.terms.items():
            term = Poly.const(nv, c)
            for v, e in enumerate(m):
                while len(powers[v]) <= e:
                    powers[v].append(powers[v][-1] * subs[v])
                if e:
                    term = term * powers[v][e]
            out = out + term
        return out

    def evaluate(self, point: Sequence):
        total = 0
        for m, c in self.terms.items():
            term = c
            for x, e in zip(point, m):
                if e:
                    term = term * x**e
            total = total + term
        return total

    def integrate(self, box: "Box") -> Fraction:
        if len(box) != self.nvars:
            raise ValueError("box dimension does not match polynomial")
        total = Fraction(0)
        for m, c in self.terms.items():
            term = c
            for (a, b), e in zip(box.intervals, m):
                term *= (b ** (e + 1) - a ** (e + 1)) / (e + 1)
            total += term
        return total

    def __str__(self) -> str:
        names = var_names(self.nvars)
        items = sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
        return _fmt((_monomial_str(m, names), c) for m, c in items)

    def __repr__(self) -> str:
        return f"Poly({self})"


@dataclass(frozen=True)
class Box:
    """Product of closed rational intervals."""

    intervals: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        ivs = tuple((Fraction(a), Fraction(b)) for a, b in self.intervals)
        if any(a >= b for a, b in ivs):
            raise ValueError(f"box {ivs} has empty interior")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def unit(cls, nvars: int) -> "Box":
        return cls(((0, 1),) * nvars)

    def __len__(self) -> int:
        return len(self.intervals)

    def contains_box(self, other: "Box") -> bool:
        return len(self) == len(other) and all(
            a <= c and d <= b for (a, b), (c, d) in zip(self.intervals, other.intervals)
        )

    def contains_point(self, point: Sequence) -> bool:
        return all(a <= x <= b for (a, b), x in zip(self.intervals, point))

    def __str__(self) -> str:
        return "x".join(f"[{a},{b}]" for a, b in self.intervals)

    @classmethod
    def parse(cls, text: str) -> "Box":
        parts = re.findall(r"\[\s*([^\],]+)\s*,\s*([^\]]+)\s*\]", text)
        if not parts or "x".join(f"[{a},{b}]" for a, b in parts) != re.sub(r"\s+", "", text):
            raise ValueError(f"cannot parse box {text!r}")
        return cls(tuple((Fraction(a.strip()), Fraction(b.strip())) for a, b in parts))


@lru_cache(maxsize=None)
def _bump_poly(a: Fraction, b: Fraction, power: int, order: int) -> Poly:
    # B^(order)(x) on [a, b] as a univariate polynomial in x
    length = b - a
    u = Poly(1, {(1,): 1 / length, (0,): -a / length})
    bump = (u**power) * ((Poly.const(1, 1) - u) ** power)
    for _ in range(order):
        bump = bump.derive(0)
    return bump


@lru_cache(maxsize=None)
def bump_moment(a: Fraction, b: Fraction, power: int, order: int, m: int) -> Fraction:
    """``int_a^b x^m B^(order)(x) dx``."""
    integrand = _bump_poly(a, b, power, order) * Poly(1, {(m,): 1})
    return integrand.integrate(Box(((a, b),)))


def bump_value(a: Fraction, b: Fraction, power: int, order: int, x) -> Fraction:
    if not a <= x <= b:
        return 0
    return _bump_poly(a, b, power, order).evaluate((x,))


BumpKey = Tuple[Exp, Exp]


class BumpPoly:
    """Polynomial times a separable piecewise-polynomial bump (see module doc)."""

    __slots__ = ("support", "power", "terms")

    def __init__(self, support: Box, power: int, terms: Optional[Dict[BumpKey, Scalar]] = None):
        self.support = support
        self.power = power
        self.terms = {k: Fraction(c) for k, c in (terms or {}).items() if c}

    @classmethod
    def _raw(cls, support, power, terms) -> "BumpPoly":
        p = cls.__new__(cls)
        p.support = support
        p.power = power
        p.terms = terms
        return p

    @classmethod
    def from_poly(cls, poly: Poly, support: Box, power: int = 2) -> "BumpPoly":
        if len(support) != poly.nvars:
            raise ValueError("support box dimension does not match polynomial")
        e0 = (0,) * poly.nvars
        return cls._raw(support, power, {(e0, m): c for m, c in poly.terms.items()})

    @property
    def nvars(self) -> int:
        return len(self.support)

    def zero_like(self) -> "BumpPoly":
        return BumpPoly._raw(self.support, self.power, {})

    def is_zero(self) -> bool:
        return not self.terms

    def _compatible(self, other: "BumpPoly") -> None:
        if self.support != other.support or self.power != other.power:
            raise ValueError("combining bump functions with different supports")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BumpPoly):
            return NotImplemented
        return (self.support, self.power, self.terms) == (other.support, other.power, other.terms)

    def __hash__(self) -> int:
        return hash((self.support, self.power, frozenset(self.terms.items())))

    def __add__(self, other):
        if not isinstance(other, BumpPoly):
            return NotImplemented
        self._compatible(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return BumpPoly._raw(self.support, self.power, out)

    def __neg__(self) -> "BumpPoly":
        return BumpPoly._raw(self.support, self.power, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.zero_like()
            s = Fraction(other)
            return BumpPoly._raw(self.support, self.power, {k: s * c for k, c in self.terms.items()})
        if not isinstance(other, Poly):
            # a product of two bump functions leaves the representable class
            return NotImplemented
        out: Dict[BumpKey, Fraction] = {}
        for (e, ma), ca in self.terms.items():
            for mb, cb in other.terms.items():
                k = (e, tuple(x + y for x, y in zip(ma, mb)))
                out[k] = out.get(k, 0) + ca * cb
        return BumpPoly._raw(self.support, self.power, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def derive(self, v: int) -> "BumpPoly":
        out: Dict[BumpKey, Fraction] = {}
        for (e, m), c in self.terms.items():
            if m[v]:
                mm = list(m)
                mm[v] -= 1
                k = (e, tuple(mm))
                out[k] = out.get(k, 0) + c * m[v]
            ee = list(e)
            ee[v] += 1
            k = (tuple(ee), m)
            out[k] = out.get(k, 0) + c
        return BumpPoly._raw(self.support, self.power, {k: c for k, c in out.items() if c})

    def mul_var(self, v: int) -> "BumpPoly":
        out = {}
        for (e, m), c in self.terms.items():
            mm = list(m)
            mm[v] += 1
            out[(e, tuple(mm))] = c
        return BumpPoly._raw(self.support, self.power, out)

    def max_derivative_order(self) -> int:
        return max((max(e) for e, _ in self.terms), default=0)

    def integrate(self, box: Optional[Box] = None) -> Fraction:
        if box is not None and not box.contains_box(self.support):
            raise ValueError(f"bump support {self.support} leaks outside {box}")
        total = Fraction(0)
        ivs = self.support.intervals
        for (e, m), c in self.terms.items():
            term = c
            for (a, b), ev, mv in zip(ivs, e, m):
                term *= bump_moment(a, b, self.power, ev, mv)
                if not term:
                    break
            total += term
        return total

    def evaluate(self, point: Sequence):
        total = 0
        for (e, m), c in self.terms.items():
            term = c
            for (a, b), ev, mv, x in zip(self.support.intervals, e, m, point):
                term = term * x**mv * bump_value(a, b, self.power, ev, x)
            total = total + term
        return total

    def expand(self) -> Poly:
        """The polynomial that agrees with this function inside its support."""
        nv = self.nvars
        out = Poly(nv)
        for (e, m), c in self.terms.items():
            term = Poly(nv, {m: c})
            for v, ((a, b), ev) in enumerate(zip(self.support.intervals, e)):
                uni = _bump_poly(a, b, self.power, ev)
                subs = [Poly.var(nv, v)]
                term = term * uni.compose(subs)
            out = out + term
        return out

    def __str__(self) -> str:
        names = var_names(self.nvars)

        def label(key):
            e, m = key
            bumps = [f"B{ev}({names[v]})" for v, ev in enumerate(e)]
            mono = _monomial_str(m, names)
            return "*".join(([mono] if mono else []) + bumps)

        return _fmt((label(k), c) for k, c in sorted(self.terms.items()))

    def __repr__(self) -> str:
        return f"BumpPoly({self}, support={self.support}, power={self.power})"


Coefficient = Union[Poly, BumpPoly]
