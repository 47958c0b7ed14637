"""Heisenberg group law, exact contact maps, Pansu differentials and pullback.

The group law is pinned to the coframe in :mod:`rumin.forms`:

    (x, t) . (x', t') = (x + x', t + t' - 1/2 * omega(x, x'))

with ``omega(x, y) = sum_j x_{2j-1} y_{2j} - x_{2j} y_{2j-1}``.  With this sign
``th[2n+1] = dt + 1/2 omega(x, dx)`` is left-invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from rumin.exterior import AlgebraMap, Monomial
from rumin.forms import (
    HALF,
    PolyForm,
    as_polyform,
    d_poly,
    horizontal_derive,
    in_J,
    integrate_top,
    wedge,
)
from rumin.graded import GradedHom, make_heisenberg
from rumin.poly import Box, BumpPoly, Poly
from rumin.rumin import MembershipError, SupportError, rumin_d


def omega(x: Sequence, y: Sequence):
    return sum(x[2 * j] * y[2 * j + 1] - x[2 * j + 1] * y[2 * j] for j in range(len(x) // 2))


@dataclass(frozen=True)
class HeisPoint:
    x: Tuple
    t: object

    @classmethod
    def of(cls, coords: Sequence) -> "HeisPoint":
        return cls(tuple(coords[:-1]), coords[-1])

    @property
    def n(self) -> int:
        return len(self.x) // 2

    def coords(self) -> Tuple:
        return (*self.x, self.t)


def _same_n(a: HeisPoint, b: HeisPoint) -> None:
    if len(a.x) != len(b.x) or len(a.x) % 2:
        raise ValueError(f"points of H_{a.n} and H_{b.n}")


def group_mul(a: HeisPoint, b: HeisPoint) -> HeisPoint:
    _same_n(a, b)
    x = tuple(p + q for p, q in zip(a.x, b.x))
    return HeisPoint(x, a.t + b.t - omega(a.x, b.x) / 2)


def group_inv(a: HeisPoint) -> HeisPoint:
    return HeisPoint(tuple(-v for v in a.x), -a.t)


def identity_point(n: int, zero=0) -> HeisPoint:
    return HeisPoint((zero,) * (2 * n), zero)


def dilate(r, p: HeisPoint) -> HeisPoint:
    if r == 0:
        raise ValueError("dilation by zero")
    return HeisPoint(tuple(r * v for v in p.x), r * r * p.t)


def symplectic_matrix(n: int) -> List[List[Fraction]]:
    """Gram matrix of ``omega`` in the coordinates ``x1..x2n``."""
    m = [[Fraction(0)] * (2 * n) for _ in range(2 * n)]
    for j in range(n):
        m[2 * j][2 * j + 1] = Fraction(1)
        m[2 * j + 1][2 * j] = Fraction(-1)
    return m


class ContactError(ValueError):
    """A map does not preserve the contact structure."""


@dataclass(frozen=True)
class ContactFactor:
    ok: bool
    lam: Poly  # coefficient of th[2n+1] in f^* th[2n+1]
    residual: PolyForm  # horizontal part of f^* th[2n+1]; zero for contact maps


def _coordinate_pullback_theta(n: int, comps: Sequence[Poly]) -> PolyForm:
    out = d_poly(PolyForm.function(comps[-1], n))
    for j in range(n):
        a, b = comps[2 * j], comps[2 * j + 1]
        out = out + d_poly(PolyForm.function(b, n)).scale(a * HALF)
        out = out - d_poly(PolyForm.function(a, n)).scale(b * HALF)
    return out


def contact_factor(f: "ContactMap") -> ContactFactor:
    """Factor ``f^* th[2n+1] = lam * th[2n+1]``, or report the residual."""
    n = f.n
    dim = 2 * n + 1
    pulled = _coordinate_pullback_theta(n, f.components)
    lam = pulled.coefficient((dim,))
    residual = PolyForm(n, 1, {m: c for m, c in pulled.terms.items() if m != (dim,)})
    return ContactFactor(residual.is_zero() and not lam.is_zero(), lam, residual)


@dataclass(frozen=True, eq=False)
class ContactMap:
    """A polynomial self-map of H_n given by its coordinate functions."""

    n: int
    components: Tuple[Poly, ...]
    lam: Optional[Poly] = None
    label: str = "map"

    def __post_init__(self) -> None:
        dim = 2 * self.n + 1
        if len(self.components) != dim or any(c.nvars != dim for c in self.components):
            raise ValueError(f"a map of H_{self.n} needs {dim} components in {dim} variables")

    @property
    def dim(self) -> int:
        return 2 * self.n + 1

    @classmethod
    def raw(cls, n: int, components: Sequence[Poly], label: str = "raw") -> "ContactMap":
        """Unchecked map; ``contact_factor`` reports whether it is contact."""
        return cls(n, tuple(components), None, label)

    @classmethod
    def checked(cls, n: int, components: Sequence[Poly], label: str) -> "ContactMap":
        f = cls.raw(n, components, label)
        cf = contact_factor(f)
        if not cf.ok:
            raise ContactError(f"{label} is not contact; residual {cf.residual}")
        return cls(n, tuple(components), cf.lam, label)

    @classmethod
    def identity(cls, n: int) -> "ContactMap":
        dim = 2 * n + 1
        return cls.checked(n, [Poly.var(dim, v) for v in range(dim)], "identity")

    @classmethod
    def translation(cls, g: Union[HeisPoint, Sequence]) -> "ContactMap":
        g = g if isinstance(g, HeisPoint) else HeisPoint.of([Fraction(v) for v in g])
        n = g.n
        dim = 2 * n + 1
        xs = [Poly.var(dim, v) for v in range(2 * n)]
        comps = [xs[v] + Fraction(g.x[v]) for v in range(2 * n)]
        # t-component of g . (x, t)
        tc = Poly.var(dim, 2 * n) + Fraction(g.t)
        tc = tc - omega([Fraction(v) for v in g.x], xs) * HALF
        label = "translate:" + ",".join(str(v) for v in g.coords())
        return cls.checked(n, comps + [tc], label)

    @classmethod
    def dilation(cls, n: int, r) -> "ContactMap":
        r = Fraction(r)
        if r == 0:
            raise ValueError("dilation by zero")
        dim = 2 * n + 1
        comps = [Poly.var(dim, v) * r for v in range(2 * n)] + [Poly.var(dim, 2 * n) * (r * r)]
        return cls.checked(n, comps, f"dilate:{r}")

    @classmethod
    def linear_symplectic(cls, matrix: Sequence[Sequence]) -> "ContactMap":
        """``x -> A x``, ``t -> mu t`` where ``A^T Omega A = mu Omega``."""
        a = [[Fraction(v) for v in row] for row in matrix]
        size = len(a)
        if size % 2 or any(len(row) != size for row in a):
            raise ValueError("symplectic matrix must be square of even size")
        n = size // 2
        om = symplectic_matrix(n)
        gram = [[sum(a[k][i] * om[k][l] * a[l][j] for k in range(size) for l in range(size))
                 for j in range(size)] for i in range(size)]
        mu = gram[0][1]
        if mu == 0 or any(gram[i][j] != mu * om[i][j] for i in range(size) for j in range(size)):
            raise ContactError("matrix is not conformally symplectic")
        dim = size + 1
        xs = [Poly.var(dim, v) for v in range(size)]
        comps = [sum((xs[j] * a[i][j] for j in range(size)), Poly(dim)) for i in range(size)]
        comps.append(Poly.var(dim, size) * mu)
        label = "symplectic:" + ",".join(str(v) for row in a for v in row)
        return cls.checked(n, comps, label)

    @classmethod
    def shear(cls, n: int, j: int, p: Union[Poly, Sequence]) -> "ContactMap":
        """``x_{2j} += p(x_{2j-1})`` and ``t += q(x_{2j-1})``, ``q' = (p - x p')/2``, ``q(0) = 0``."""
        if not 1 <= j <= n:
            raise ValueError(f"shear axis {j} outside 1..{n}")
        coeffs = _univariate_coeffs(p)
        dim = 2 * n + 1
        u = Poly.var(dim, 2 * j - 2)
        p_of_u = sum((u**m * c for m, c in enumerate(coeffs) if c), Poly(dim))
        q_of_u = sum((u ** (m + 1) * (c * (1 - m) / (2 * (m + 1))) for m, c in enumerate(coeffs) if c),
                     Poly(dim))
        comps = [Poly.var(dim, v) for v in range(dim)]
        comps[2 * j - 1] = comps[2 * j - 1] + p_of_u
        comps[-1] = comps[-1] + q_of_u
        label = f"shear:j={j},p={Poly(1, {(m,): c for m, c in enumerate(coeffs)})}"
        return cls.checked(n, comps, label)

    def compose(self, inner: "ContactMap") -> "ContactMap":
        """``self o inner``: apply ``inner`` first."""
        if self.n != inner.n:
            raise ValueError("composing maps of different Heisenberg groups")
        comps = [c.compose(inner.components) for c in self.components]
        label = f"compose({self.label};{inner.label})"
        if self.lam is not None and inner.lam is not None:
            return ContactMap(self.n, tuple(comps), self.lam.compose(inner.components) * inner.lam, label)
        return ContactMap.raw(self.n, comps, label)

    def __call__(self, point: Union[HeisPoint, Sequence]):
        coords = point.coords() if isinstance(point, HeisPoint) else tuple(point)
        return HeisPoint.of([c.evaluate(coords) for c in self.components])

    def as_function(self) -> Callable[[HeisPoint], HeisPoint]:
        """Floating-point evaluator, for the numeric differential."""
        def fn(p: HeisPoint) -> HeisPoint:
            coords = tuple(float(v) for v in p.coords())
            return HeisPoint.of([float(c.evaluate(coords)) for c in self.components])

        return fn


def compose(*maps: ContactMap) -> ContactMap:
    """``compose(f, g, h) = f o g o h``."""
    out = maps[-1]
    for f in reversed(maps[:-1]):
        out = f.compose(out)
    return out


def _univariate_coeffs(p) -> List[Fraction]:
    if isinstance(p, Poly):
        if p.nvars != 1:
            raise ValueError("shear profile must be univariate")
        deg = p.degree()
        return [p.terms.get((m,), Fraction(0)) for m in range(deg + 1)]
    return [Fraction(c) for c in p]


@dataclass(frozen=True)
class PansuDifferential:
    horizontal: Tuple[Tuple, ...]  # 2n x 2n, [a][b] = th[a](D X_b)
    vertical: object

    @property
    def n(self) -> int:
        return len(self.horizontal) // 2

    def matrix(self) -> List[List]:
        size = len(self.horizontal)
        m = [list(row) + [0] for row in self.horizontal]
        m.append([0] * size + [self.vertical])
        return m

    def as_hom(self) -> GradedHom:
        h = make_heisenberg(self.n)
        return GradedHom(h, h, AlgebraMap.from_matrix(self.matrix()))


def _lam(f: ContactMap) -> Poly:
    if f.lam is not None:
        return f.lam
    cf = contact_factor(f)
    if not cf.ok:
        raise ContactError(f"{f.label} is not contact; residual {cf.residual}")
    return cf.lam


def pansu_exact(f: ContactMap, p: Union[HeisPoint, Sequence]) -> PansuDifferential:
    coords = p.coords() if isinstance(p, HeisPoint) else tuple(p)
    n = f.n
    horiz = tuple(
        tuple(Fraction(horizontal_derive(b, f.components[a], n).evaluate(coords)) for b in range(1, 2 * n + 1))
        for a in range(2 * n)
    )
    return PansuDifferential(horiz, Fraction(_lam(f).evaluate(coords)))


@lru_cache(maxsize=256)
def _pansu_coframe_images(f: ContactMap) -> Tuple[PolyForm, ...]:
    n = f.n
    dim = 2 * n + 1
    images = []
    for a in range(2 * n):
        terms = {(b,): horizontal_derive(b, f.components[a], n) for b in range(1, 2 * n + 1)}
        images.append(PolyForm(n, 1, terms))
    images.append(PolyForm(n, 1, {(dim,): _lam(f)}))
    return tuple(images)


def pansu_pullback(f: ContactMap, w) -> PolyForm:
    """``(f_P^* w)(x) = (D_P f(x))^* w(f(x))`` with exact polynomial coefficients."""
    w = as_polyform(w, f.n)
    if w.n != f.n:
        raise ValueError("form and map live on different Heisenberg groups")
    images = _pansu_coframe_images(f)
    cache: Dict[Monomial, PolyForm] = {}
    out = PolyForm.zero(f.n, w.degree)
    for mono, c in w.terms.items():
        if not isinstance(c, Poly):
            raise TypeError("only polynomial forms on the target can be pulled back")
        frame = cache.get(mono)
        if frame is None:
            frame = PolyForm.function(Poly.const(f.dim, 1), f.n)
            for j in mono:
                frame = wedge(frame, images[j - 1])
            cache[mono] = frame
        out = out + frame.scale(c.compose(f.components))
    return out


def _check_test_form(eta: PolyForm, box: Box) -> None:
    for coeff in eta.terms.values():
        if not isinstance(coeff, BumpPoly):
            raise SupportError("test forms must carry a compactly supported bump")
        if not box.contains_box(coeff.support):
            raise SupportError(f"test form support {coeff.support} leaks outside {box}")


def theorem_j_check(f: ContactMap, alpha, eta: PolyForm, box: Box) -> Fraction:
    """``int f_P^* d alpha ^ eta - (-1)^{k+1} int f_P^* alpha ^ d eta`` for J-valued ``alpha``."""
    alpha = as_polyform(alpha, f.n)
    k = alpha.degree
    if not in_J(alpha):
        raise MembershipError(f"{alpha} is not J-valued")
    if eta.degree != f.dim - k - 1:
        raise ValueError(f"test form must have degree {f.dim - k - 1}")
    _check_test_form(eta, box)
    lhs = integrate_top(wedge(pansu_pullback(f, d_poly(alpha)), eta), box)
    rhs = integrate_top(wedge(pansu_pullback(f, alpha), d_poly(eta)), box)
    return lhs - (-1) ** (k + 1) * rhs


def rumin_chain_check(f: ContactMap, k: int, alpha, eta: PolyForm, box: Box,
                      degree_bound: Optional[int] = None) -> Fraction:
    """``int f_P^* alpha ^ d_{2n-k} eta - (-1)^{k+1} int f_P^* d_k alpha ^ eta``."""
    n = f.n
    alpha = as_polyform(alpha, n)
    if not 0 <= k < 2 * n + 1:
        raise ValueError(f"degree {k} outside 0..{2 * n}")
    if alpha.degree != k or eta.degree != 2 * n - k:
        raise ValueError(f"need a {k}-form and a test {2 * n - k}-form")
    _check_test_form(eta, box)
    if k > n and not in_J(alpha):
        raise MembershipError(f"{alpha} is not J-valued")
    if 2 * n - k > n and not in_J(eta):
        raise MembershipError("test form must be J-valued")
    lhs = integrate_top(wedge(pansu_pullback(f, alpha), rumin_d(n, 2 * n - k, eta)), box)
    d_alpha = rumin_d(n, k, alpha, degree_bound)
    rhs = integrate_top(wedge(pansu_pullback(f, d_alpha), eta), box)
    return lhs - (-1) ** (k + 1) * rhs


# numeric Pansu differential

DEFAULT_SCALES = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class NumericPansu:
    scales: Tuple[float, ...]
    estimates: Tuple[PansuDifferential, ...]
    leaks: Tuple[float, ...]  # off-grading parts of the quotients, should tend to 0
    extrapolated: PansuDifferential
    errors: Tuple[float, ...]  # per-scale distance to the extrapolant
    converged: bool


def _flatten(d: PansuDifferential) -> List[float]:
    return [v for row in d.horizontal for v in row] + [d.vertical]


def _unflatten(vals: Sequence[float], n: int) -> PansuDifferential:
    size = 2 * n
    rows = tuple(tuple(vals[a * size:(a + 1) * size]) for a in range(size))
    return PansuDifferential(rows, vals[-1])


def distance(a: PansuDifferential, b: PansuDifferential) -> float:
    return max(abs(float(x) - float(y)) for x, y in zip(_flatten(a), _flatten(b)))


def _quotient(fn, p: HeisPoint, v: HeisPoint, s: float) -> HeisPoint:
    fp = fn(p)
    moved = fn(group_mul(p, dilate(s, v)))
    return dilate(1.0 / s, group_mul(group_inv(fp), moved))


def _estimate(fn, p: HeisPoint, n: int, s: float) -> Tuple[PansuDifferential, float]:
    size = 2 * n
    cols, leak = [], 0.0
    for b in range(size):
        e = HeisPoint(tuple(1.0 if v == b else 0.0 for v in range(size)), 0.0)
        q = _quotient(fn, p, e, s)
        cols.append(q.x)
        leak = max(leak, abs(q.t))
    q = _quotient(fn, p, HeisPoint((0.0,) * size, 1.0), s)
    leak = max(leak, max((abs(v) for v in q.x), default=0.0))
    horiz = tuple(tuple(cols[b][a] for b in range(size)) for a in range(size))
    return PansuDifferential(horiz, q.t), leak


def richardson(coarse: PansuDifferential, fine: PansuDifferential, ratio: float) -> PansuDifferential:
    """Cancel a first-order error term between scales ``s`` and ``s / ratio``."""
    vals = [(ratio * f - c) / (ratio - 1) for c, f in zip(_flatten(coarse), _flatten(fine))]
    return _unflatten(vals, coarse.n)


def pansu_numeric(f, p: Union[HeisPoint, Sequence], scales: Sequence[float] = DEFAULT_SCALES,
                  n: Optional[int] = None, tol: float = 1e-6) -> NumericPansu:
    """Estimate ``D_P f(p)`` from ``delta_{1/s}(f(p)^{-1} f(p delta_s v))``.

    The sequence counts as converged when the distances to the extrapolant
    shrink with the scale, or all stay below ``tol`` (a Pansu-linear map seen
    through rounding noise).
    """
    if isinstance(f, ContactMap):
        n = f.n
        fn = f.as_function()
    else:
        fn = f
    p = p if isinstance(p, HeisPoint) else HeisPoint.of(list(p))
    p = HeisPoint(tuple(float(v) for v in p.x), float(p.t))
    n = n if n is not None else p.n
    scales = tuple(scales)
    if len(scales) < 2 or any(b >= a for a, b in zip(scales, scales[1:])) or scales[-1] <= 0:
        raise ValueError("need at least two strictly decreasing positive scales")
    ests, leaks = [], []
    for s in scales:
        est, leak = _estimate(fn, p, n, s)
        ests.append(est)
        leaks.append(leak)
    extrap = richardson(ests[-2], ests[-1], scales[-2] / scales[-1])
    errors = tuple(distance(e, extrap) for e in ests)
    finite = all(math.isfinite(v) for e in ests for v in _flatten(e))
    shrinking = all(b <= a for a, b in zip(errors, errors[1:]))
    converged = finite and (shrinking or max(errors) <= tol)
    return NumericPansu(scales, tuple(ests), tuple(leaks), extrap, errors, converged)


def convergence_order(scales: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``log(error)`` against ``log(scale)``."""
    xs = [math.log(s) for s in scales]
    ys = [math.log(e) for e in errors]
    mx, my = sum(xs) / len(xs), sum(ys) / len(ys)
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den
