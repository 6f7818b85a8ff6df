import random

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legsheaf.field import GF, QQ
from legsheaf.linalg import Matrix


def test_rank_identity():
    assert Matrix.identity(QQ, 2).rank() == 2


def test_rank_proportional_rows():
    assert Matrix(QQ, 2, 2, [[1, 2], [2, 4]]).rank() == 1


def test_rank_equal_rows_f2():
    assert Matrix(GF(2), 2, 2, [[1, 1], [1, 1]]).rank() == 1


def test_rank_empty():
    assert Matrix(QQ, 0, 3).rank() == 0
    assert Matrix(QQ, 3, 0).rank() == 0


@given(st.integers(2, 5), st.integers(2, 5), st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_rank_nullity(rows, cols, seed):
    rng = random.Random(seed)
    for field in (QQ, GF(2), GF(5)):
        m = Matrix(field, rows, cols, [[rng.randint(-4, 4) for _ in range(cols)] for _ in range(rows)])
        assert m.rank() + m.kernel_basis().cols == cols


def test_field_independence_on_unimodular():
    # ranks over QQ and GF(p) agree when p divides no elementary divisor
    data = [[1, 2, 0], [0, 1, 3], [0, 0, 1]]
    for field in (QQ, GF(2), GF(3), GF(7)):
        assert Matrix(field, 3, 3, data).rank() == 3


def test_rank_char_dependent():
    data = [[2]]
    assert Matrix(QQ, 1, 1, data).rank() == 1
    assert Matrix(GF(2), 1, 1, data).rank() == 0


def test_kernel_is_kernel():
    rng = random.Random(7)
    for field in (QQ, GF(3)):
        m = Matrix(field, 3, 5, [[rng.randint(-3, 3) for _ in range(5)] for _ in range(3)])
        k = m.kernel_basis()
        assert m.matmul(k).is_zero()


def test_solve():
    m = Matrix(QQ, 2, 2, [[1, 2], [3, 4]])
    rhs = Matrix(QQ, 2, 1, [[5], [6]])
    x = m.solve(rhs)
    assert m.matmul(x) == rhs
    singular = Matrix(QQ, 2, 2, [[1, 1], [1, 1]])
    assert singular.solve(Matrix(QQ, 2, 1, [[0], [1]])) is None


def test_fraction_entries():
    m = Matrix(QQ, 2, 2, [[Fraction(1, 2), Fraction(1, 3)], [Fraction(3, 2), 2]])
    assert m.rank() == 2


def test_kron_and_block():
    a = Matrix(QQ, 1, 2, [[1, 2]])
    b = Matrix(QQ, 2, 1, [[3], [4]])
    k = a.kron(b)
    assert (k.rows, k.cols) == (2, 2)
    assert k.data[0][0] == 3 and k.data[1][1] == 8
    s = Matrix.direct_sum(a, b)
    assert (s.rows, s.cols) == (3, 3)


def test_gf_parsing():
    f = GF(5)
    assert f.of("1/2") == 3  # 2 * 3 = 6 = 1 mod 5
    with pytest.raises(ValueError):
        GF(6)
