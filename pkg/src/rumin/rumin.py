"""The Rumin differentials on polynomial (and bump) forms, and their weak form.

``R^k`` is ``Omega^k / I^k`` for ``k <= n`` (classes are represented by their
canonical-complement representative) and ``J^k`` for ``k > n``.  The middle
differential lifts a class to the unique representative whose ``d`` is
J-valued, by solving an exact linear system.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Set, Tuple, Union

from rumin import linalg
from rumin.exterior import Form, SubspaceBasis, monomials, th
from rumin.fibers import ideal_I_fiber
from rumin.forms import (
    PolyForm,
    as_polyform,
    d_poly,
    horizontal_derive,
    in_J,
    integrate_top,
    j_defect,
    pointwise_reduce,
    wedge,
)
from rumin.graded import make_heisenberg
from rumin.poly import Box, BumpPoly, Poly

# above this many unknowns the lift is solved on the derivative-closed key set
FULL_SPACE_LIMIT = 3000


class MembershipError(ValueError):
    """A form expected to be J-valued is not."""


class SupportError(ValueError):
    """A test form is not compactly supported inside the integration box."""


class LiftError(RuntimeError):
    """The lift system is infeasible or has a nontrivial kernel."""


def I_basis(n: int, k: int) -> SubspaceBasis:
    return ideal_I_fiber(make_heisenberg(n), k)


def reduce_mod_I(w: PolyForm) -> PolyForm:
    """Canonical representative of the class of ``w`` modulo I."""
    return pointwise_reduce(w, I_basis(w.n, w.degree))


def in_I(w: PolyForm) -> bool:
    return reduce_mod_I(w).is_zero()


@lru_cache(maxsize=None)
def _exponents_upto(nvars: int, degree: int) -> Tuple[Tuple[int, ...], ...]:
    out = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), total):
            e = [0] * nvars
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
    return tuple(out)


@dataclass(frozen=True)
class LiftSolution:
    form: PolyForm  # the lift alpha + correction
    correction: PolyForm
    unknowns: int
    kernel_dim: int
    space: str


def _basis_function(template, key):
    if isinstance(template, BumpPoly):
        return BumpPoly._raw(template.support, template.power, {key: Fraction(1)})
    return Poly._raw(template.nvars, {key: Fraction(1)})


def _defect_vector(w: PolyForm, out: Dict[Tuple, Fraction]) -> None:
    for which, part in enumerate(j_defect(d_poly(w))):
        for mono, f in part.terms.items():
            for key, c in f.terms.items():
                out[(which, mono, key)] = out.get((which, mono, key), 0) + c


@lru_cache(maxsize=None)
def vertical_correction_basis(n: int) -> Tuple[Form, ...]:
    """``th[2n+1] ^ th_J`` for horizontal ``J`` of size ``n-1``."""
    dim = 2 * n + 1
    return tuple(th(dim, *m, dim) for m in monomials(2 * n, n - 1))


def lift_system(n: int, alpha: Union[PolyForm, Form], degree_bound: Optional[int] = None,
                space: str = "auto", corrections: str = "vertical") -> LiftSolution:
    """Solve for the lift of the class of ``alpha`` whose ``d`` is J-valued.

    ``alpha`` is first replaced by its canonical representative, then a
    correction ``c`` is solved for with ``d(alpha + c)`` pointwise in J^{n+1}.
    With ``corrections="vertical"`` ``c`` ranges over ``th[2n+1] ^ Lambda^{n-1} V_1``
    and the solution is unique; ``corrections="ideal"`` lets ``c`` range over
    all of I^n, where for ``n >= 2`` the closed forms ``d(f th[2n+1] ^ ...)``
    make up a kernel (the system is then only solved, not required unique).

    ``space`` picks the coefficient space for ``c``: ``"full"`` is every
    polynomial of degree ``<= degree_bound``; ``"support"`` is spanned by the
    coefficient keys of ``alpha`` and of their frame derivatives, which always
    contains the solution.  ``"auto"`` uses ``full`` when it is small enough.
    """
    alpha = as_polyform(alpha, n)
    if alpha.degree != n:
        raise ValueError(f"lift needs an {n}-form, got degree {alpha.degree}")
    if corrections == "vertical":
        rows = vertical_correction_basis(n)
        base = reduce_mod_I(alpha)
    elif corrections == "ideal":
        rows = I_basis(n, n).rows
        base = alpha
    else:
        raise ValueError(f"unknown correction space {corrections!r}")
    if base.is_zero():
        return LiftSolution(base, base - alpha, 0, 0, "trivial")
    template = next(iter(base.terms.values()))
    bump = isinstance(template, BumpPoly)
    if degree_bound is None:
        degree_bound = alpha.poly_degree()

    if space == "auto":
        full_size = len(_exponents_upto(alpha.dim, degree_bound)) * len(rows)
        space = "support" if bump or full_size > FULL_SPACE_LIMIT else "full"
    if space == "full":
        if bump:
            raise ValueError("the full polynomial space is not defined for bump coefficients")
        keys = list(_exponents_upto(alpha.dim, degree_bound))
    elif space == "support":
        found: Set = set()
        for f in alpha.terms.values():
            found.update(f.terms)
            for i in range(1, alpha.dim + 1):
                found.update(horizontal_derive(i, f, n).terms)
        keys = sorted(found)
    else:
        raise ValueError(f"unknown lift space {space!r}")

    unknowns = [(key, r) for key in keys for r in range(len(rows))]
    eq_index: Dict[Tuple, int] = {}
    matrix_rows: List[Dict[int, Fraction]] = []

    def row_for(eq):
        idx = eq_index.get(eq)
        if idx is None:
            idx = eq_index[eq] = len(matrix_rows)
            matrix_rows.append({})
        return matrix_rows[idx]

    for col, (key, r) in enumerate(unknowns):
        vec: Dict[Tuple, Fraction] = {}
        _defect_vector(PolyForm.from_invariant(rows[r], n, _basis_function(template, key)), vec)
        for eq, v in vec.items():
            if v:
                row_for(eq)[col] = v
    rhs_vec: Dict[Tuple, Fraction] = {}
    _defect_vector(base, rhs_vec)
    for eq in rhs_vec:
        row_for(eq)
    rhs = [Fraction(0)] * len(matrix_rows)
    for eq, v in rhs_vec.items():
        rhs[eq_index[eq]] = -v

    try:
        sol, kernel_dim = linalg.solve(matrix_rows, rhs, len(unknowns))
    except linalg.InconsistentSystem:
        raise LiftError(f"no lift of {alpha} in the {space} coefficient space") from None
    if kernel_dim and corrections == "vertical":
        raise LiftError(f"lift of {alpha} is not unique: kernel dimension {kernel_dim}")

    correction = PolyForm.zero(n, n)
    for col, v in sol.items():
        key, r = unknowns[col]
        correction = correction + PolyForm.from_invariant(rows[r], n, _basis_function(template, key) * v)
    lifted = base + correction
    return LiftSolution(lifted, lifted - alpha, len(unknowns), kernel_dim, space)


def rumin_lift(n: int, alpha: Union[PolyForm, Form], degree_bound: Optional[int] = None,
               space: str = "auto") -> PolyForm:
    return lift_system(n, alpha, degree_bound, space).form


def rumin_d(n: int, k: int, w: Union[PolyForm, Form], degree_bound: Optional[int] = None) -> PolyForm:
    """Rumin differential ``d_k`` on a representative of degree ``k``."""
    w = as_polyform(w, n)
    if w.degree != k:
        raise ValueError(f"expected a {k}-form, got degree {w.degree}")
    if not 0 <= k <= 2 * n + 1:
        raise ValueError(f"degree {k} outside 0..{2 * n + 1}")
    if k < n:
        return reduce_mod_I(d_poly(w))
    if k == n:
        return d_poly(rumin_lift(n, w, degree_bound))
    if not in_J(w):
        raise MembershipError(f"{w} is not J-valued")
    return d_poly(w)


def _check_test_form(eta: PolyForm, box: Box) -> None:
    if eta.is_zero():
        return
    for f in eta.terms.values():
        if not isinstance(f, BumpPoly):
            raise SupportError("test forms must carry a compactly supported bump")
        if not box.contains_box(f.support):
            raise SupportError(f"test form support {f.support} leaks outside {box}")


def weak_identity_check(n: int, k: int, beta, gamma, eta: PolyForm, box: Box) -> Fraction:
    """``int beta ^ d_{2n-k} eta - (-1)^{k+1} int gamma ^ eta``, exactly.

    ``eta`` must be a bump form of degree ``2n-k``: J-valued when ``k < n``,
    any representative when ``k >= n``.
    """
    if not 0 <= k < 2 * n + 1:
        raise ValueError(f"degree {k} outside 0..{2 * n}")
    beta, gamma = as_polyform(beta, n), as_polyform(gamma, n)
    if eta.degree != 2 * n - k:
        raise ValueError(f"test form must have degree {2 * n - k}")
    _check_test_form(eta, box)
    if k < n and not in_J(eta):
        raise MembershipError("test form for k < n must be J-valued")
    if k > n and not in_J(beta):
        raise MembershipError("beta must be J-valued for k > n")
    if k >= n and not in_J(gamma):
        raise MembershipError("gamma must be J-valued for k >= n")
    lhs = integrate_top(wedge(beta, rumin_d(n, 2 * n - k, eta)), box)
    rhs = integrate_top(wedge(gamma, eta), box)
    return lhs - (-1) ** (k + 1) * rhs
