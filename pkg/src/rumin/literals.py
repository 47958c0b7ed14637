"""Text literals for forms, polynomials, boxes and contact maps.

Forms are sums of ``c * monomial * th[i,j,...]`` terms, for example
``3/2*x1^2*t*th[1,3] - th[2,3]``.  Expressions are parsed with sympy after
``th[...]`` blocks are swapped for placeholder symbols, so products and
parentheses expand as usual; each expanded term may carry at most one
``th`` factor.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from rumin.exterior import Form, normalize_monomial
from rumin.forms import PolyForm
from rumin.poly import Box, Poly, var_names


class LiteralError(ValueError):
    """Malformed literal text."""


_ALLOWED = re.compile(r"^[0-9A-Za-z_\[\],+\-*/^(). ]*$")
_TH = re.compile(r"th\[\s*([0-9,\s]*)\s*\]")
_TRANSFORMS = standard_transformations + (convert_xor,)


def _to_fraction(value) -> Fraction:
    r = sympy.Rational(value)
    return Fraction(int(r.p), int(r.q))


def _aliases(nvars: int) -> Dict[str, int]:
    if nvars == 0:
        return {}
    names = var_names(nvars)
    out = {name: i for i, name in enumerate(names)}
    if nvars == 3:
        out.update({"x": 0, "y": 1})
    return out


def _parse_terms(text: str, nvars: int, dim: Optional[int]):
    """Yield ``(theta_tuple, exponent, Fraction)`` from an expanded literal."""
    if not text.strip():
        raise LiteralError("empty literal")
    if not _ALLOWED.match(text):
        raise LiteralError(f"unexpected characters in {text!r}")
    thetas: Dict[str, Tuple[int, ...]] = {}

    def swap(match: re.Match) -> str:
        body = match.group(1).strip()
        idx = tuple(int(p) for p in body.split(",") if p.strip()) if body else ()
        name = "TH_" + "_".join(map(str, idx)) if idx else "TH_"
        thetas[name] = idx
        return name

    body = _TH.sub(swap, text)
    if "th" in body.replace("TH_", ""):
        raise LiteralError(f"malformed th[...] in {text!r}")
    aliases = _aliases(nvars)
    symbols = {name: sympy.Symbol(name) for name in list(aliases) + list(thetas)}
    # vet identifiers before sympy evaluates anything
    unknown = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", body)) - set(symbols)
    if unknown:
        raise LiteralError(f"unknown names {sorted(unknown)} in {text!r}")
    try:
        expr = parse_expr(body, local_dict=symbols, transformations=_TRANSFORMS)
    except Exception as exc:  # sympy raises a zoo of types on bad input
        raise LiteralError(f"cannot parse {text!r}: {exc}") from None
    if expr.has(sympy.zoo, sympy.nan, sympy.oo):
        raise LiteralError(f"division by zero in {text!r}")
    gens = [symbols[name] for name in aliases] + [symbols[name] for name in thetas]
    if not gens:
        gens = [sympy.Symbol("_unused")]
    try:
        poly = sympy.Poly(sympy.expand(expr), *gens, domain="QQ")
    except sympy.PolynomialError as exc:
        raise LiteralError(f"not a polynomial: {text!r} ({exc})") from None
    var_index = list(aliases.values())
    theta_names = list(thetas)
    nalias = len(aliases)
    for powers, coeff in poly.terms():
        if not coeff:
            continue
        th_pows = powers[nalias:nalias + len(theta_names)]
        used = [theta_names[i] for i, p in enumerate(th_pows) if p]
        if sum(th_pows) > 1:
            raise LiteralError(f"term with several th factors in {text!r}; write th[i,j] instead")
        exponent = [0] * nvars
        for slot, p in zip(var_index, powers[:nalias]):
            exponent[slot] += p
        idx = thetas[used[0]] if used else ()
        if dim is not None and any(not 1 <= i <= dim for i in idx):
            raise LiteralError(f"th index outside 1..{dim} in {text!r}")
        yield idx, tuple(exponent), _to_fraction(coeff)


def _assemble(items, dim: int):
    degree = None
    terms: Dict[Tuple[int, ...], Dict[Tuple[int, ...], Fraction]] = {}
    for idx, exponent, coeff in items:
        sign, mono = normalize_monomial(idx, dim)
        if mono is None:
            continue
        if degree is None:
            degree = len(mono)
        elif degree != len(mono):
            raise LiteralError("terms of mixed degree")
        slot = terms.setdefault(mono, {})
        slot[exponent] = slot.get(exponent, Fraction(0)) + sign * coeff
    return (degree or 0), terms


def parse_form(text: str, dim: int) -> Form:
    """Left-invariant form with rational coefficients."""
    degree, terms = _assemble(_parse_terms(text, 0, dim), dim)
    return Form(dim, degree, {m: c.get((), Fraction(0)) for m, c in terms.items()})


def parse_poly_form(text: str, n: int, degree: Optional[int] = None) -> PolyForm:
    """Form on H_n with polynomial coefficients in ``x1..x2n, t``."""
    dim = 2 * n + 1
    deg, terms = _assemble(_parse_terms(text, dim, dim), dim)
    if not terms and degree is not None:
        deg = degree
    if degree is not None and deg != degree:
        raise LiteralError(f"expected a {degree}-form, got degree {deg}")
    return PolyForm(n, deg, {m: Poly(dim, c) for m, c in terms.items()})


def parse_poly(text: str, nvars: int) -> Poly:
    out = {}
    for idx, exponent, coeff in _parse_terms(text, nvars, None):
        if idx:
            raise LiteralError(f"unexpected th factor in polynomial {text!r}")
        out[exponent] = out.get(exponent, Fraction(0)) + coeff
    return Poly(nvars, out)


def parse_box(text: str, dim: Optional[int] = None) -> Box:
    try:
        box = Box.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise LiteralError(str(exc)) from None
    if dim is not None and len(box) != dim:
        raise LiteralError(f"box {text!r} has {len(box)} factors, expected {dim}")
    if any(a >= b for a, b in box.intervals):
        raise LiteralError(f"empty interval in box {text!r}")
    return box


def _fractions(text: str) -> List[Fraction]:
    try:
        return [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise LiteralError(f"expected comma-separated rationals, got {text!r}") from None


def _split_top(text: str, sep: str) -> List[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise LiteralError(f"unbalanced parentheses in {text!r}")
        elif ch == sep and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    if depth:
        raise LiteralError(f"unbalanced parentheses in {text!r}")
    parts.append(text[start:])
    return [p.strip() for p in parts]


def parse_map(text: str, n: int):
    """Contact map literal.

    ``identity``, ``shear:j=1,p=x^2``, ``dilate:3/2``, ``translate:1,0,0``,
    ``symplectic:a11,a12,...`` (row major), ``compose(f;g;...)`` for ``f o g o ...``.
    """
    from rumin.pansu import ContactError, ContactMap, compose

    text = text.strip()
    try:
        if text == "identity":
            return ContactMap.identity(n)
        if text.startswith("compose(") and text.endswith(")"):
            parts = _split_top(text[len("compose("):-1], ";")
            if any(not p for p in parts):
                raise LiteralError(f"empty factor in {text!r}")
            return compose(*(parse_map(p, n) for p in parts))
        kind, _, args = text.partition(":")
        if kind == "dilate":
            (r,) = _fractions(args)
            if r == 0:
                raise LiteralError("dilation by zero")
            return ContactMap.dilation(n, r)
        if kind == "translate":
            vals = _fractions(args)
            if len(vals) != 2 * n + 1:
                raise LiteralError(f"translation of H_{n} needs {2 * n + 1} coordinates")
            return ContactMap.translation(vals)
        if kind == "symplectic":
            vals = _fractions(args)
            size = 2 * n
            if len(vals) != size * size:
                raise LiteralError(f"symplectic map of H_{n} needs {size * size} entries")
            return ContactMap.linear_symplectic([vals[i * size:(i + 1) * size] for i in range(size)])
        if kind == "shear":
            fields = dict(part.split("=", 1) for part in _split_top(args, ",") if "=" in part)
            if set(fields) != {"j", "p"}:
                raise LiteralError(f"shear needs j=... and p=..., got {args!r}")
            return ContactMap.shear(n, int(fields["j"]), parse_poly(fields["p"], 1))
    except LiteralError:
        raise
    except (ContactError, ValueError) as exc:
        raise LiteralError(f"bad map {text!r}: {exc}") from None
    raise LiteralError(f"unknown map literal {text!r}")
