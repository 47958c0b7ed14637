"""Sparse exact linear algebra over the rationals.

Rows are ``dict[int, Fraction]`` keyed by column index.  Pivots are always the
smallest column present in a row, so the reduced form is unique and
deterministic for a fixed column numbering.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

Row = Dict[int, Fraction]


class InconsistentSystem(ArithmeticError):
    """Raised when a linear system has no solution."""


def _clean(row: Row) -> Row:
    return {c: Fraction(v) for c, v in row.items() if v != 0}


def _axpy(target: Row, scale: Fraction, source: Row) -> None:
    # target -= scale * source, in place, pruning zeros
    for c, v in source.items():
        nv = target.get(c, 0) - scale * v
        if nv:
            target[c] = nv
        else:
            target.pop(c, None)


class Echelon:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self) -> None:
        self.pivots: Dict[int, Row] = {}
        # column -> pivot columns whose rows contain that column
        self._occurs: Dict[int, set] = {}

    def reduce(self, row: Row) -> Row:
        r = _clean(row)
        for p in [c for c in r if c in self.pivots]:
            coeff = r.get(p)
            if coeff:
                _axpy(r, coeff, self.pivots[p])
        return r

    def add(self, row: Row) -> bool:
        """Insert ``row``; return True if it enlarged the span."""
        r = self.reduce(row)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        r = {c: v * inv for c, v in r.items()}
        for q in list(self._occurs.get(p, ())):
            prow = self.pivots[q]
            coeff = prow.get(p)
            if not coeff:
                continue
            before = set(prow)
            _axpy(prow, coeff, r)
            for c in before - set(prow):
                self._occurs.get(c, set()).discard(q)
            for c in set(prow) - before:
                self._occurs.setdefault(c, set()).add(q)
        self.pivots[p] = r
        for c in r:
            self._occurs.setdefault(c, set()).add(p)
        return True

    def rows(self) -> List[Row]:
        return [self.pivots[p] for p in sorted(self.pivots)]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rref(rows: Iterable[Row]) -> List[Row]:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return ech.rows()


def rank(rows: Iterable[Row]) -> int:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return ech.rank


def nullspace(rows: Iterable[Row], ncols: int) -> List[Row]:
    """Basis of ``{v : row . v = 0 for every row}``, one vector per free column."""
    reduced = rref(rows)
    pivot_cols = [min(r) for r in reduced]
    pivot_set = set(pivot_cols)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec: Row = {free: Fraction(1)}
        for p, r in zip(pivot_cols, reduced):
            v = r.get(free)
            if v:
                vec[p] = -v
        basis.append(vec)
    return basis


def solve(rows: Sequence[Row], rhs: Sequence[Fraction], ncols: int) -> Tuple[Row, int]:
    """Solve ``A x = b`` for sparse ``A``.

    Returns one solution (free variables set to zero) and the dimension of the
    homogeneous kernel.  Raises :class:`InconsistentSystem` if there is none.
    """
    if len(rows) != len(rhs):
        raise ValueError("row/rhs length mismatch")
    ech = Echelon()
    aug = ncols  # augmented column sorts after every unknown
    for row, b in zip(rows, rhs):
        r = dict(row)
        if b:
            r[aug] = Fraction(b)
        ech.add(r)
    if aug in ech.pivots:
        raise InconsistentSystem("linear system has no solution")
    sol: Row = {}
    for p, r in ech.pivots.items():
        v = r.get(aug, 0)
        if v:
            sol[p] = Fraction(v)
    return sol, ncols - ech.rank


def dense_rank(matrix: Sequence[Sequence[Fraction]]) -> int:
    return rank({j: v for j, v in enumerate(row) if v} for row in matrix)


def det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [[Fraction(v) for v in row] for row in matrix]
    size = len(m)
    if any(len(row) != size for row in m):
        raise ValueError("determinant of a non-square matrix")
    result = Fraction(1)
    for col in range(size):
        piv = next((r for r in range(col, size) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            result = -result
        pv = m[col][col]
        result *= pv
        for r in range(col + 1, size):
            f = m[r][col] / pv
            if f:
                for c in range(col, size):
                    m[r][c] -= f * m[col][c]
    return result
