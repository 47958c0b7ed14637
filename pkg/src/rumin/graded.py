"""Graded nilpotent Lie algebras described by their coframe differentials.

An algebra is a list of contiguous layers ``I_1, ..., I_s`` of ``1..N`` and a
table ``dtheta[i]`` of 2-forms.  Index ``i`` in layer ``j`` has weight ``-j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple

from rumin.exterior import (
    AlgebraMap,
    DimensionError,
    Form,
    Monomial,
    pullback_invariant,
    th,
    wedge,
)


class AlgebraError(ValueError):
    """The layer/differential data does not describe a graded nilpotent algebra."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GradedAlgebra:
    dim: int
    layers: Tuple[Tuple[int, ...], ...]
    dtheta: Mapping[int, Form] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        layers = tuple(tuple(layer) for layer in self.layers)
        object.__setattr__(self, "layers", layers)
        flat = [i for layer in layers for i in layer]
        if flat != list(range(1, self.dim + 1)) or any(not layer for layer in layers):
            raise AlgebraError(f"layers {layers} are not a contiguous ordered partition of 1..{self.dim}")
        table = {}
        for i in range(1, self.dim + 1):
            f = self.dtheta.get(i, Form.zero(self.dim, 2))
            if f.dim != self.dim:
                raise DimensionError(f"dtheta[{i}] over dimension {f.dim}")
            if not f.is_zero() and f.degree != 2:
                raise AlgebraError(f"dtheta[{i}] has degree {f.degree}")
            table[i] = f if not f.is_zero() else Form.zero(self.dim, 2)
        object.__setattr__(self, "dtheta", table)
        for i, f in table.items():
            for m in f.terms:
                if sum(self.wt(a) for a in m) != self.wt(i):
                    raise AlgebraError(f"dtheta[{i}] contains th{list(m)} of the wrong weight")
        for i in range(1, self.dim + 1):
            dd = d_invariant(self, table[i])
            if not dd.is_zero():
                raise AlgebraError(f"d(dtheta[{i}]) = {dd} is nonzero (Jacobi identity fails)")

    def __hash__(self) -> int:
        return hash((self.dim, self.layers, tuple(self.dtheta[i] for i in range(1, self.dim + 1))))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedAlgebra):
            return NotImplemented
        return (self.dim, self.layers, self.dtheta) == (other.dim, other.layers, other.dtheta)

    @property
    def step(self) -> int:
        return len(self.layers)

    def layer_of(self, i: int) -> int:
        for j, layer in enumerate(self.layers, start=1):
            if i in layer:
                return j
        raise DimensionError(f"index {i} outside 1..{self.dim}")

    def wt(self, i: int) -> int:
        return -self.layer_of(i)

    @property
    def homogeneous_dim(self) -> int:
        return sum(j * len(layer) for j, layer in enumerate(self.layers, start=1))

    @property
    def higher(self) -> Tuple[int, ...]:
        """Indices of layers 2 and up."""
        return tuple(i for layer in self.layers[1:] for i in layer)

    def theta_higher(self) -> Form:
        return th(self.dim, *self.higher)

    def __repr__(self) -> str:
        return f"GradedAlgebra({self.name or self.layers})"


def make_heisenberg(n: int) -> GradedAlgebra:
    if n < 1:
        raise ValueError(f"Heisenberg algebra needs n >= 1, got {n}")
    return _heisenberg(n)


@lru_cache(maxsize=None)
def _heisenberg(n: int) -> GradedAlgebra:
    dim = 2 * n + 1
    dt = Form(dim, 2, {(2 * j - 1, 2 * j): Fraction(1) for j in range(1, n + 1)})
    return GradedAlgebra(dim, (tuple(range(1, 2 * n + 1)), (dim,)), {dim: dt}, name=f"heisenberg:{n}")


def direct_sum_indices(g: GradedAlgebra, h: GradedAlgebra) -> Tuple[Dict[int, int], Dict[int, int]]:
    """Index maps into the direct sum: layer by layer, ``g``'s indices first."""
    left, right = {}, {}
    nxt = 1
    for j in range(max(g.step, h.step)):
        for i in g.layers[j] if j < g.step else ():
            left[i] = nxt
            nxt += 1
        for i in h.layers[j] if j < h.step else ():
            right[i] = nxt
            nxt += 1
    return left, right


def _relabel(f: Form, mapping: Mapping[int, int], dim: int) -> Form:
    out = Form.zero(dim, f.degree)
    for m, c in f.terms.items():
        out = out + Form.from_seq(dim, [mapping[i] for i in m], c)
    return out


def direct_sum(g: GradedAlgebra, h: GradedAlgebra) -> GradedAlgebra:
    left, right = direct_sum_indices(g, h)
    dim = g.dim + h.dim
    layers = []
    for j in range(max(g.step, h.step)):
        layer = [left[i] for i in (g.layers[j] if j < g.step else ())]
        layer += [right[i] for i in (h.layers[j] if j < h.step else ())]
        layers.append(tuple(layer))
    dtheta = {left[i]: _relabel(f, left, dim) for i, f in g.dtheta.items()}
    dtheta.update({right[i]: _relabel(f, right, dim) for i, f in h.dtheta.items()})
    return GradedAlgebra(dim, tuple(layers), dtheta, name=f"({g.name}+{h.name})")


@lru_cache(maxsize=None)
def _d_monomial(g: GradedAlgebra, mono: Monomial) -> Form:
    out = Form.zero(g.dim, len(mono) + 1)
    for pos, i in enumerate(mono):
        left = th(g.dim, *mono[:pos])
        right = th(g.dim, *mono[pos + 1 :])
        piece = wedge(wedge(left, g.dtheta[i]), right)
        out = out + (piece if pos % 2 == 0 else -piece)
    return out


def d_invariant(g: GradedAlgebra, w: Form) -> Form:
    """Exterior derivative of a left-invariant form (antiderivation of ``dtheta``)."""
    if w.dim != g.dim:
        raise DimensionError(f"form over dimension {w.dim}, algebra dimension {g.dim}")
    out = Form.zero(g.dim, w.degree + 1)
    for m, c in w.terms.items():
        out = out + _d_monomial(g, m) * c
    return out


def weight_of(g: GradedAlgebra, w: Form) -> Optional[int]:
    """Largest monomial weight of ``w``; ``None`` for the zero form."""
    if w.dim != g.dim:
        raise DimensionError("weight of a form over another algebra")
    if w.is_zero():
        return None
    return max(sum(g.wt(i) for i in m) for m in w.terms)


@dataclass(frozen=True)
class GradedHom:
    source: GradedAlgebra
    target: GradedAlgebra
    map: AlgebraMap

    def __post_init__(self) -> None:
        if self.map.source_dim != self.source.dim or self.map.target_dim != self.target.dim:
            raise DimensionError("hom map dimensions disagree with its algebras")

    @classmethod
    def from_matrix(cls, source, target, matrix) -> "GradedHom":
        return cls(source, target, AlgebraMap.from_matrix(matrix))

    def pullback(self, w: Form) -> Form:
        return pullback_invariant(self.map, w)


@dataclass(frozen=True)
class HomReport:
    layer_preserving: bool
    bracket_compatible: bool
    violation: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.layer_preserving and self.bracket_compatible


def check_graded_hom(phi: GradedHom) -> HomReport:
    src, tgt = phi.source, phi.target
    layer_ok, first = True, None
    for j in range(1, tgt.dim + 1):
        k = tgt.layer_of(j)
        img = phi.map.images[j - 1]
        bad = [m[0] for m in img.terms if src.layer_of(m[0]) != k]
        if bad:
            layer_ok = False
            first = first or f"pullback of th'[{j}] (layer {k}) involves th[{bad[0]}]"
            break
    bracket_ok = True
    for j in range(1, tgt.dim + 1):
        lhs = phi.pullback(tgt.dtheta[j])
        rhs = d_invariant(src, phi.map.images[j - 1])
        if lhs != rhs:
            bracket_ok = False
            first = first or f"Phi^*(d th'[{j}]) = {lhs} but d(Phi^* th'[{j}]) = {rhs}"
            break
    return HomReport(layer_ok, bracket_ok, first)


@dataclass(frozen=True)
class JHypothesis:
    multiple: bool
    factor: Optional[Fraction]


def j_hypothesis_check(phi: GradedHom) -> JHypothesis:
    """Is ``Phi^* th'_{I'>=2}`` a scalar multiple of ``th_{I>=2}``?"""
    report = check_graded_hom(phi)
    if not report.valid:
        raise PreconditionError(f"not a graded homomorphism: {report.violation}")
    pulled = phi.pullback(phi.target.theta_higher())
    if pulled.is_zero():
        return JHypothesis(True, Fraction(0))
    ref = phi.source.theta_higher()
    if pulled.degree != ref.degree:
        return JHypothesis(False, None)
    (mono,) = ref.terms
    factor = pulled.coefficient(mono)
    if pulled == ref * factor:
        return JHypothesis(True, factor)
    return JHypothesis(False, None)


def dimension_criterion(g: GradedAlgebra, g_prime: GradedAlgebra) -> bool:
    """``dim G - dim V_1 <= dim G' - dim V_1'``."""
    return g.dim - len(g.layers[0]) <= g_prime.dim - len(g_prime.layers[0])


def make_abelian(m: int) -> GradedAlgebra:
    if m < 1:
        raise ValueError("abelian algebra needs dimension >= 1")
    return GradedAlgebra(m, (tuple(range(1, m + 1)),), {}, name=f"abelian:{m}")


def make_engel() -> GradedAlgebra:
    """Four-dimensional step-three algebra: ``d th3 = th12``, ``d th4 = th13``."""
    dt = {3: th(4, 1, 2), 4: th(4, 1, 3)}
    return GradedAlgebra(4, ((1, 2), (3,), (4,)), dt, name="engel")


def _split_sum(text: str) -> List[str]:
    parts, depth, start = [], 0, 0
    for pos, ch in enumerate(text):
        depth += {"(": 1, ")": -1}.get(ch, 0)
        if ch == "+" and depth == 0:
            parts.append(text[start:pos])
            start = pos + 1
    parts.append(text[start:])
    return [p.strip() for p in parts]


def load_group(source: str) -> GradedAlgebra:
    """Build a graded algebra from a name, a JSON document, or a JSON file path.

    Names: ``heisenberg:n``, ``abelian:m``, ``engel``, and sums ``a+b`` of those.
    JSON layout: ``{"layers": [[1,2],[3]], "dtheta": {"3": "th[1,2]"}}``.
    """
    from rumin.literals import parse_form

    source = source.strip()
    if source.startswith("{"):
        text = source
    else:
        while source.startswith("(") and source.endswith(")"):
            source = source[1:-1].strip()
        parts = _split_sum(source)
        if len(parts) > 1:
            out = load_group(parts[0])
            for part in parts[1:]:
                out = direct_sum(out, load_group(part))
            return out
        kind, _, arg = source.partition(":")
        if kind == "heisenberg":
            return make_heisenberg(int(arg))
        if kind == "abelian":
            return make_abelian(int(arg))
        if source == "engel":
            return make_engel()
        path = Path(source)
        if not path.is_file():
            raise ValueError(f"unknown group {source!r}")
        text = path.read_text()
    data = json.loads(text)
    layers = tuple(tuple(int(i) for i in layer) for layer in data["layers"])
    dim = sum(len(layer) for layer in layers)
    dtheta = {int(k): parse_form(v, dim) for k, v in data.get("dtheta", {}).items()}
    return GradedAlgebra(dim, layers, dtheta, name=data.get("name", ""))


def dump_group(g: GradedAlgebra) -> str:
    data = {
        "layers": [list(layer) for layer in g.layers],
        "dtheta": {str(i): str(f) for i, f in g.dtheta.items() if not f.is_zero()},
    }
    return json.dumps(data, sort_keys=True)
