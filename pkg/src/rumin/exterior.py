"""Exact exterior algebra over a finite ordered coframe ``th[1], ..., th[N]``.

Forms are sparse maps from strictly increasing index tuples to ``Fraction``
coefficients.  Everything here is rational; there is no floating point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from rumin import linalg

Monomial = Tuple[int, ...]
Scalar = Union[int, Fraction]


class DimensionError(ValueError):
    """Ambient dimensions (or index ranges) do not match."""


class DegreeError(ValueError):
    """Forms of incompatible degree were combined."""


def normalize_monomial(seq: Sequence[int], dim: int) -> Tuple[int, Optional[Monomial]]:
    """Sort an index sequence, returning ``(sign, sorted)``.

    The sign is the parity of the sorting permutation, or 0 (with ``None``) if
    an index repeats.
    """
    for i in seq:
        if not 1 <= i <= dim:
            raise DimensionError(f"index {i} outside 1..{dim}")
    if len(set(seq)) != len(seq):
        return 0, None
    inversions = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return (-1 if inversions % 2 else 1), tuple(sorted(seq))


def _merge_sign(a: Monomial, b: Monomial) -> Tuple[int, Optional[Monomial]]:
    # sign of th_a ^ th_b for sorted a, b
    if not a:
        return 1, b
    if not b:
        return 1, a
    sb = set(b)
    if any(i in sb for i in a):
        return 0, None
    inv = 0
    j = 0
    # count pairs (x in a, y in b) with x > y
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        inv += j
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


@lru_cache(maxsize=None)
def monomials(dim: int, degree: int) -> Tuple[Monomial, ...]:
    """All degree-``degree`` monomials in lexicographic order."""
    if degree < 0 or degree > dim:
        return ()
    return tuple(itertools.combinations(range(1, dim + 1), degree))


@lru_cache(maxsize=None)
def monomial_index(dim: int, degree: int) -> Dict[Monomial, int]:
    return {m: i for i, m in enumerate(monomials(dim, degree))}


@dataclass(frozen=True, eq=False)
class Form:
    """A constant-coefficient (left-invariant) form of a fixed degree."""

    dim: int
    degree: int
    terms: Mapping[Monomial, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0 <= self.degree <= self.dim:
            if self.terms and any(self.terms.values()):
                raise DegreeError(f"degree {self.degree} impossible in dimension {self.dim}")
        clean = {}
        for m, c in self.terms.items():
            if c == 0:
                continue
            if len(m) != self.degree:
                raise DegreeError(f"monomial {m} in a degree-{self.degree} form")
            if any(not 1 <= i <= self.dim for i in m):
                raise DimensionError(f"monomial {m} outside 1..{self.dim}")
            clean[tuple(m)] = Fraction(c)
        object.__setattr__(self, "terms", clean)

    @classmethod
    def zero(cls, dim: int, degree: int) -> "Form":
        return cls(dim, degree, {})

    @classmethod
    def one(cls, dim: int) -> "Form":
        return cls(dim, 0, {(): Fraction(1)})

    @classmethod
    def from_seq(cls, dim: int, seq: Sequence[int], coeff: Scalar = 1) -> "Form":
        sign, mono = normalize_monomial(seq, dim)
        if sign == 0:
            return cls.zero(dim, len(seq))
        return cls(dim, len(seq), {mono: sign * Fraction(coeff)})

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, mono: Iterable[int]) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def _check(self, other: "Form") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension {self.dim} vs {other.dim}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        if self.degree != other.degree and not (self.is_zero() or other.is_zero()):
            raise DegreeError(f"adding degree {self.degree} and {other.degree}")
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Form(self.dim, self.degree, out)

    def __neg__(self) -> "Form":
        return Form(self.dim, self.degree, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "Form":
        if isinstance(scalar, Form):
            return NotImplemented
        s = Fraction(scalar)
        return Form(self.dim, self.degree, {m: s * c for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (self.dim, self.degree, self.terms) == (other.dim, other.degree, other.terms)

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self.terms.items())))

    def leading(self) -> Monomial:
        return min(self.terms)

    def __str__(self) -> str:
        return format_terms(sorted(self.terms.items()), lambda m: _th(m))

    def __repr__(self) -> str:
        return f"Form(dim={self.dim}, {self})"


def _th(m: Monomial) -> str:
    return "th[" + ",".join(map(str, m)) + "]" if m else ""


def format_terms(items, render) -> str:
    """Join ``coeff * label`` pieces in the ``3/2*th[1,3] - th[2,3]`` style."""
    out = []
    for key, c in items:
        label = render(key)
        mag = abs(c)
        if not label:
            piece = str(mag)
        elif mag == 1:
            piece = label
        else:
            piece = f"{mag}*{label}"
        if not out:
            out.append(piece if c > 0 else "-" + piece)
        else:
            out.append(("+ " if c > 0 else "- ") + piece)
    return " ".join(out) if out else "0"


def th(dim: int, *indices: int) -> Form:
    """The monomial ``th[i1] ^ ... ^ th[ik]`` (indices in any order)."""
    return Form.from_seq(dim, indices)


def wedge(a: Form, b: Form) -> Form:
    if a.dim != b.dim:
        raise DimensionError(f"wedge of dimension {a.dim} and {b.dim}")
    deg = a.degree + b.degree
    out: Dict[Monomial, Fraction] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            sign, m = _merge_sign(ma, mb)
            if sign:
                out[m] = out.get(m, 0) + sign * ca * cb
    if deg > a.dim:
        return Form(a.dim, deg, {})
    return Form(a.dim, deg, out)


def wedge_all(forms: Sequence[Form], dim: int) -> Form:
    out = Form.one(dim)
    for f in forms:
        out = wedge(out, f)
    return out


@dataclass(frozen=True)
class AlgebraMap:
    """A linear map presented by pullbacks of the target coframe.

    ``images[j - 1]`` is the degree-1 source form ``Phi^* th'[j]``.
    """

    source_dim: int
    target_dim: int
    images: Tuple[Form, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.target_dim:
            raise DimensionError(f"{len(self.images)} images for target dimension {self.target_dim}")
        for im in self.images:
            if im.dim != self.source_dim:
                raise DimensionError("image form over the wrong source dimension")
            if im.degree != 1:
                raise DegreeError("images must be 1-forms")

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[Scalar]]) -> "AlgebraMap":
        """``matrix[a][b] = th'[a+1](Phi X[b+1])``: rows index the target."""
        target_dim = len(matrix)
        source_dim = len(matrix[0]) if matrix else 0
        images = tuple(
            Form(source_dim, 1, {(b + 1,): Fraction(v) for b, v in enumerate(row)}) for row in matrix
        )
        return cls(source_dim, target_dim, images)

    def matrix(self) -> List[List[Fraction]]:
        return [[im.coefficient((b,)) for b in range(1, self.source_dim + 1)] for im in self.images]


def pullback_invariant(phi: AlgebraMap, w: Form) -> Form:
    if w.dim != phi.target_dim:
        raise DimensionError(f"form over dimension {w.dim}, map target {phi.target_dim}")
    out = Form.zero(phi.source_dim, w.degree)
    for m, c in w.terms.items():
        piece = wedge_all([phi.images[j - 1] for j in m], phi.source_dim)
        out = out + piece * c
    return out


@dataclass(frozen=True)
class SubspaceBasis:
    """Row-reduced basis of a subspace of the degree-``degree`` forms.

    Rows are normalized so each leading (lexicographically smallest) monomial
    has coefficient 1 and appears in no other row.
    """

    dim: int
    degree: int
    rows: Tuple[Form, ...]

    @property
    def pivots(self) -> Tuple[Monomial, ...]:
        return tuple(r.leading() for r in self.rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def reduce(self, w: Form) -> Form:
        """Remainder of ``w`` on the non-pivot monomials."""
        if w.dim != self.dim:
            raise DimensionError("reducing a form of another dimension")
        out = w
        for r in self.rows:
            c = out.coefficient(r.leading())
            if c:
                out = out - r * c
        return out

    def contains(self, w: Form) -> bool:
        return self.reduce(w).is_zero()

    def complement(self) -> Tuple[Form, ...]:
        """Non-pivot monomials: the canonical complementary subspace."""
        piv = set(self.pivots)
        return tuple(th(self.dim, *m) for m in monomials(self.dim, self.degree) if m not in piv)


def _to_row(w: Form) -> linalg.Row:
    idx = monomial_index(w.dim, w.degree)
    return {idx[m]: c for m, c in w.terms.items()}


def _from_row(row: linalg.Row, dim: int, degree: int) -> Form:
    monos = monomials(dim, degree)
    return Form(dim, degree, {monos[i]: c for i, c in row.items()})


def span_reduce(gens: Iterable[Form], dim: Optional[int] = None, degree: Optional[int] = None) -> SubspaceBasis:
    gens = list(gens)
    dims = {g.dim for g in gens} | ({dim} if dim is not None else set())
    if len(dims) > 1:
        raise DimensionError(f"generators over dimensions {sorted(dims)}")
    degs = {g.degree for g in gens} | ({degree} if degree is not None else set())
    if len(degs) > 1:
        raise DegreeError(f"generators of mixed degrees {sorted(degs)}")
    if not dims or not degs:
        raise ValueError("empty generator list needs explicit dim and degree")
    (d,), (k,) = dims, degs
    rows = linalg.rref(_to_row(g) for g in gens)
    return SubspaceBasis(d, k, tuple(_from_row(r, d, k) for r in rows))


def annihilator(
    gens: Union[SubspaceBasis, Iterable[Form]], target_degree: int, dim: Optional[int] = None
) -> SubspaceBasis:
    """Basis of ``{a : a ^ g = 0 for every generator g}`` in degree ``target_degree``.

    Generators may have mixed degrees.
    """
    gens = list(gens.rows if isinstance(gens, SubspaceBasis) else gens)
    dims = {g.dim for g in gens} | ({dim} if dim is not None else set())
    if len(dims) != 1:
        raise DimensionError("annihilator needs a single ambient dimension")
    (d,) = dims
    cols = monomials(d, target_degree)
    eqs: Dict[Tuple[int, Monomial], linalg.Row] = {}
    for gi, g in enumerate(gens):
        for ci, m in enumerate(cols):
            for mg, cg in g.terms.items():
                sign, out = _merge_sign(m, mg)
                if sign:
                    row = eqs.setdefault((gi, out), {})
                    row[ci] = row.get(ci, 0) + sign * cg
    kernel = linalg.nullspace(eqs.values(), len(cols))
    return span_reduce((_from_row(v, d, target_degree) for v in kernel), dim=d, degree=target_degree)


def wedge_map_rank(gens: Sequence[Form], degree: int, dim: int) -> int:
    """Rank of ``a -> (a ^ g)_g`` on degree-``degree`` forms."""
    cols = monomials(dim, degree)
    # transpose: one row per source monomial, keyed by (generator, result)
    keyed: Dict[Tuple[int, Monomial], int] = {}
    rows = []
    for m in cols:
        row: linalg.Row = {}
        for gi, g in enumerate(gens):
            for mg, cg in g.terms.items():
                sign, out = _merge_sign(m, mg)
                if sign:
                    key = keyed.setdefault((gi, out), len(keyed))
                    row[key] = row.get(key, 0) + sign * cg
        rows.append(row)
    return linalg.rank(rows)
