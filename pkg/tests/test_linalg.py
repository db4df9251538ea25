from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ainfqi.linalg import (
    GF, QQ, FieldMismatch, Matrix, SparseSystem, field_from_name, kernel_basis, rank, rref, solve,
)

from strategies import matrices, scalars


def M(rows, k=QQ, cols=None):
    return Matrix.from_rows(k, rows, cols=cols)


# --- scalars ---------------------------------------------------------------


def test_rationals_lowest_terms():
    assert QQ.norm(Fraction(4, -6)) == Fraction(-2, 3)
    assert QQ.format(QQ.norm(Fraction(-1, 2))) == "-1/2"
    assert QQ.format(QQ.norm(3)) == "3"
    assert QQ.parse("-1/2") == Fraction(-1, 2)


def test_prime_field_canonical():
    k = GF(7)
    assert k.norm(-1) == 6
    assert k.norm(15) == 1
    assert k.inv(3) * 3 % 7 == 1
    assert k.format(k.norm(-1)) == "6"


@pytest.mark.parametrize("name", ["f:4", "f:1", "f:2147483648", "r", "f:x"])
def test_bad_field_names(name):
    with pytest.raises(ValueError):
        field_from_name(name)


def test_field_names():
    assert field_from_name("q") is QQ or field_from_name("q") == QQ
    assert field_from_name("f:10007") == GF(10007)


def test_mixed_fields_rejected():
    with pytest.raises(FieldMismatch):
        M([[1]]) @ M([[1]], GF(5))


# --- rref ------------------------------------------------------------------


def test_rref_identity():
    red, piv = rref(Matrix.identity(QQ, 2))
    assert red == Matrix.identity(QQ, 2)
    assert piv == [0, 1]


def test_rref_zero():
    red, piv = rref(Matrix.zeros(QQ, 2, 3))
    assert red == Matrix.zeros(QQ, 2, 3)
    assert piv == []


def test_rref_hand_example():
    red, piv = rref(M([[2, 4], [1, 2]]))
    assert red == M([[1, 2], [0, 0]])
    assert piv == [0]


# --- solve -----------------------------------------------------------------


def test_solve_identity():
    v = (QQ.norm(1), QQ.norm(Fraction(-2, 3)), QQ.norm(5))
    assert solve(Matrix.identity(QQ, 3), v) == v


def test_solve_zeroes_free_variables():
    assert solve(M([[1, 1]]), (0,)) == (0, 0)


def test_solve_inconsistent():
    assert solve(M([[0]]), (1,)) is None


def test_solve_free_variable_rule_nontrivial():
    # x + 2y + z = 3, z = 1 -> pivots x, z; y free -> (2, 0, 1)
    assert solve(M([[1, 2, 1], [0, 0, 1]]), (3, 1)) == (2, 0, 1)


# --- kernel ----------------------------------------------------------------


def test_kernel_injective():
    assert kernel_basis(Matrix.identity(QQ, 3)).cols == 0


def test_kernel_zero_map():
    assert kernel_basis(Matrix.zeros(QQ, 1, 2)) == Matrix.identity(QQ, 2)


def test_kernel_hand_example():
    k = kernel_basis(M([[1, 2]]))
    assert k == M([[-2], [1]])


# --- sparse solver ---------------------------------------------------------


def test_sparse_matches_dense():
    a = M([[1, 2, 1], [0, 0, 1], [1, 2, 2]])
    b = (3, 1, 4)
    s = SparseSystem(QQ, 3)
    for i in range(3):
        s.add_row({j: a[i, j] for j in range(3) if a[i, j]}, b[i])
    assert tuple(s.solution()) == solve(a, b)


def test_sparse_inconsistent():
    s = SparseSystem(QQ, 1)
    s.add_row({0: 1}, 1)
    s.add_row({0: 1}, 2)
    assert s.solution() is None


# --- properties ------------------------------------------------------------


@given(matrices())
def test_kernel_property(a):
    k = kernel_basis(a)
    assert (a @ k).is_zero()
    assert rank(a) + k.cols == a.cols


@given(matrices())
def test_rref_idempotent(a):
    red, _ = rref(a)
    assert rref(red)[0] == red


@given(st.data())
def test_solve_property(data):
    a = data.draw(matrices())
    x = data.draw(st.lists(scalars(a.field), min_size=a.cols, max_size=a.cols))
    b = a.apply(tuple(a.field.norm(v) for v in x))
    sol = solve(a, b)
    assert sol is not None
    assert a.apply(sol) == b


@given(st.data())
def test_solve_sparse_agrees(data):
    a = data.draw(matrices())
    b = data.draw(st.lists(scalars(a.field), min_size=a.rows, max_size=a.rows))
    b = tuple(a.field.norm(v) for v in b)
    s = SparseSystem(a.field, a.cols)
    for i in range(a.rows):
        s.add_row({j: a[i, j] for j in range(a.cols) if a[i, j]}, b[i])
    dense = solve(a, b)
    sparse = s.solution()
    assert (dense is None) == (sparse is None)
    if dense is not None:
        assert tuple(sparse) == dense


@given(matrices())
def test_no_floats(a):
    red, _ = rref(a)
    assert not any(isinstance(x, float) for x in red.entries)
