"""Left-invariant Rumin data: the fibers of I^k and J^k, Lefschetz maps, duality."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, Optional, Tuple, Union

from rumin import linalg
from rumin.exterior import (
    Form,
    SubspaceBasis,
    annihilator,
    monomials,
    span_reduce,
    th,
    wedge,
)
from rumin.graded import GradedAlgebra, make_heisenberg, weight_of


def _check_k(g: GradedAlgebra, k: int) -> None:
    if not 0 <= k <= g.dim:
        raise ValueError(f"degree {k} outside 0..{g.dim}")


def _generators(g: GradedAlgebra) -> List[Form]:
    gens = []
    for i in g.higher:
        gens.append(th(g.dim, i))
        if not g.dtheta[i].is_zero():
            gens.append(g.dtheta[i])
    return gens


@lru_cache(maxsize=None)
def ideal_I_fiber(g: GradedAlgebra, k: int) -> SubspaceBasis:
    """Span of ``th_i ^ L^(k-1) + d th_i ^ L^(k-2)`` over higher-layer ``i``."""
    _check_k(g, k)
    gens = []
    for gen in _generators(g):
        for m in monomials(g.dim, k - gen.degree):
            gens.append(wedge(gen, th(g.dim, *m)))
    return span_reduce(gens, dim=g.dim, degree=k)


@lru_cache(maxsize=None)
def ideal_J_fiber(g: GradedAlgebra, k: int) -> SubspaceBasis:
    """Forms killed by every ``th_i`` and ``d th_i`` with ``i`` in layers >= 2."""
    _check_k(g, k)
    basis = annihilator(_generators(g), k, dim=g.dim)
    top = g.theta_higher()
    for row in basis.rows:
        # every J element is divisible by th_{I>=2}
        if any(not set(g.higher) <= set(m) for m in row.terms):
            raise AssertionError(f"J element {row} is not a multiple of {top}")
    return basis


def _n_of(g: Union[GradedAlgebra, int]) -> int:
    if isinstance(g, int):
        return g
    n = (g.dim - 1) // 2
    if g != make_heisenberg(n):
        raise ValueError(f"{g!r} is not a Heisenberg algebra")
    return n


@dataclass(frozen=True)
class RuminFiber:
    k: int
    kind: str  # "quotient" (k <= n) or "ideal" (k >= n+1)
    basis: Tuple[Form, ...]
    ideal_basis: SubspaceBasis

    @property
    def dimension(self) -> int:
        return len(self.basis)


@lru_cache(maxsize=None)
def rumin_fiber(n: int, k: int) -> RuminFiber:
    g = make_heisenberg(n)
    ideal = ideal_I_fiber(g, k)
    if k <= n:
        return RuminFiber(k, "quotient", ideal.complement(), ideal)
    return RuminFiber(k, "ideal", ideal_J_fiber(g, k).rows, ideal)


def horizontal_monomials(n: int, k: int):
    """Monomials of ``Lambda^k V_1``: those omitting the index ``2n+1``."""
    return monomials(2 * n, k)


@dataclass(frozen=True)
class LefschetzReport:
    n: int
    k: int
    matrix: Tuple[Tuple[Fraction, ...], ...]  # rows: Lambda^{k+2} V_1, cols: Lambda^k V_1
    rank: int
    injective: bool
    surjective: bool

    @property
    def shape(self) -> Tuple[int, int]:
        return comb(2 * self.n, self.k + 2), comb(2 * self.n, self.k)


def lefschetz(n: int, k: int) -> LefschetzReport:
    """``W_k(a) = d th[2n+1] ^ a`` from ``Lambda^k V_1`` to ``Lambda^{k+2} V_1``."""
    if not 0 <= k <= 2 * n:
        raise ValueError(f"Lefschetz degree {k} outside 0..{2 * n}")
    g = make_heisenberg(n)
    omega = g.dtheta[g.dim]
    src = horizontal_monomials(n, k)
    tgt = horizontal_monomials(n, k + 2)
    tidx = {m: i for i, m in enumerate(tgt)}
    cols = [wedge(omega, th(g.dim, *m)) for m in src]
    matrix = tuple(tuple(c.coefficient(t) for c in cols) for t in tgt)
    r = linalg.rank({tidx[m]: v for m, v in c.terms.items()} for c in cols)
    return LefschetzReport(n, k, matrix, r, r == len(src), r == len(tgt))


@dataclass(frozen=True)
class PairingReport:
    n: int
    k: int
    left: Tuple[Form, ...]  # complement basis of Lambda^k / I^k
    right: Tuple[Form, ...]  # basis of J^{2n+1-k}
    matrix: Tuple[Tuple[Fraction, ...], ...]
    determinant: Optional[Fraction]

    @property
    def square(self) -> bool:
        return len(self.left) == len(self.right)

    @property
    def nondegenerate(self) -> bool:
        return self.square and bool(self.determinant)


def duality_pairing(g: Union[GradedAlgebra, int], k: int) -> PairingReport:
    """Wedge pairing ``Lambda^k/I^k x J^{2n+1-k} -> Lambda^{2n+1}`` in bases."""
    n = _n_of(g)
    if not 0 <= k <= n:
        raise ValueError(f"pairing degree {k} outside 0..{n}")
    left = rumin_fiber(n, k).basis
    right = rumin_fiber(n, 2 * n + 1 - k).basis
    top = tuple(range(1, 2 * n + 2))
    matrix = tuple(tuple(wedge(a, b).coefficient(top) for b in right) for a in left)
    det = linalg.det(matrix) if len(left) == len(right) else None
    return PairingReport(n, k, left, right, matrix, det)


def rumin_fiber_dims(n: int) -> Tuple[int, ...]:
    """``dim R^k`` for ``k = 0..2n+1`` computed from the I/J fibers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return tuple(rumin_fiber(n, k).dimension for k in range(2 * n + 2))


def rumin_dim_formula(n: int, k: int) -> int:
    """``C(2n,k) - C(2n,k-2)`` for ``k <= n``, mirrored for ``k > n``."""
    if k > n:
        k = 2 * n + 1 - k
    return comb(2 * n, k) - (comb(2 * n, k - 2) if k >= 2 else 0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str  # "pass", "fail" or "vacuous"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fail"


def weight_codegree_check(g: GradedAlgebra, k: int) -> CheckResult:
    """Every nonzero J^k element has weight ``-nu + N - k``."""
    basis = ideal_J_fiber(g, k)
    expected = -g.homogeneous_dim + g.dim - k
    name = f"weight J^{k}"
    if not basis.rows:
        return CheckResult(name, "vacuous", f"J^{k} = 0")
    for b in basis.rows:
        w = weight_of(g, b)
        if w != expected:
            return CheckResult(name, "fail", f"wt({b}) = {w}, expected {expected}")
    return CheckResult(name, "pass", f"{len(basis)} basis elements of weight {expected}")


def J_fiber_via_lefschetz(n: int, k: int) -> SubspaceBasis:
    """J^k as ``th[2n+1] ^ ker W_{k-1}``; independent of the annihilator route."""
    g = make_heisenberg(n)
    if k == 0:
        return span_reduce([], dim=g.dim, degree=0)
    rep = lefschetz(n, k - 1) if k - 1 <= 2 * n else None
    src = horizontal_monomials(n, k - 1)
    if rep is None:
        return span_reduce([], dim=g.dim, degree=k)
    rows = [{j: v for j, v in enumerate(row) if v} for row in rep.matrix]
    kernel = linalg.nullspace(rows, len(src))
    theta = th(g.dim, g.dim)
    gens = []
    for vec in kernel:
        a = Form(g.dim, k - 1, {src[j]: v for j, v in vec.items()})
        gens.append(wedge(theta, a))
    return span_reduce(gens, dim=g.dim, degree=k)
