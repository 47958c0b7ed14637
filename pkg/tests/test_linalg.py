from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from oracles import as_fraction, to_sympy_matrix
from rumin import linalg
from strategies import fractions


@st.composite
def sparse_matrices(draw, max_rows=6, max_cols=6):
    ncols = draw(st.integers(1, max_cols))
    nrows = draw(st.integers(0, max_rows))
    rows = [draw(st.dictionaries(st.integers(0, ncols - 1), fractions, max_size=ncols)) for _ in range(nrows)]
    return rows, ncols


@given(sparse_matrices())
def test_rank_matches_sympy(data):
    rows, ncols = data
    assert linalg.rank(rows) == to_sympy_matrix(rows, ncols).rank()


@given(sparse_matrices())
def test_nullspace_is_kernel_of_right_size(data):
    rows, ncols = data
    kernel = linalg.nullspace(rows, ncols)
    assert len(kernel) == ncols - to_sympy_matrix(rows, ncols).rank()
    for vec in kernel:
        for row in rows:
            assert sum(v * vec.get(c, 0) for c, v in row.items()) == 0


@given(sparse_matrices())
def test_rref_rows_are_reduced(data):
    rows, _ = data
    reduced = linalg.rref(rows)
    pivots = [min(r) for r in reduced]
    assert len(set(pivots)) == len(pivots)
    for p, r in zip(pivots, reduced):
        assert r[p] == 1
        assert all(p not in other for other in reduced if other is not r)


@given(st.integers(1, 5).flatmap(lambda k: st.lists(st.lists(fractions, min_size=k, max_size=k),
                                                    min_size=k, max_size=k)))
def test_det_matches_sympy(matrix):
    expected = as_fraction(sympy.Matrix([[sympy.Rational(str(v)) for v in row] for row in matrix]).det())
    assert linalg.det(matrix) == expected


@given(sparse_matrices(), st.data())
def test_solve_returns_a_solution_when_consistent(data, draw):
    rows, ncols = data
    x = [draw.draw(fractions) for _ in range(ncols)]
    rhs = [sum(v * x[c] for c, v in row.items()) for row in rows]
    sol, kernel_dim = linalg.solve(rows, rhs, ncols)
    for row, b in zip(rows, rhs):
        assert sum(v * sol.get(c, 0) for c, v in row.items()) == b
    assert kernel_dim == ncols - linalg.rank(rows)


def test_solve_rejects_inconsistent_system():
    rows = [{0: Fraction(1)}, {0: Fraction(2)}]
    with pytest.raises(linalg.InconsistentSystem):
        linalg.solve(rows, [Fraction(1), Fraction(3)], 1)


def test_det_rejects_rectangular():
    with pytest.raises(ValueError):
        linalg.det([[1, 2]])


def test_echelon_add_reports_independence():
    ech = linalg.Echelon()
    assert ech.add({0: Fraction(1), 1: Fraction(1)})
    assert ech.add({1: Fraction(2)})
    assert not ech.add({0: Fraction(3)})
    assert ech.rank == 2
