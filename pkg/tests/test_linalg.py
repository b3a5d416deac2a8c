from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from aztec.linalg import cofactor_determinant, determinant


def test_examples():
    assert determinant([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 1
    assert determinant([[F(1, 2), 0], [F(1, 2), F(1, 2)]]) == F(1, 4)
    assert determinant([[1, 2, 3], [4, 5, 6], [1, 2, 3]]) == 0
    assert determinant([]) == 1


def test_needs_pivoting():
    assert determinant([[0, 1], [1, 0]]) == -1
    assert determinant([[0, 0, 1], [0, 1, 0], [1, 0, 0]]) == -1


def test_non_square():
    with pytest.raises(ValueError):
        determinant([[1, 2]])
    with pytest.raises(ValueError):
        cofactor_determinant([[1, 2]])


entries = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@given(st.integers(1, 5).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_bareiss_matches_cofactor(m):
    assert determinant(m) == cofactor_determinant(m)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_transpose_and_row_swap(m):
    d = determinant(m)
    assert determinant([list(r) for r in zip(*m)]) == d
    if len(m) > 1:
        assert determinant([m[1], m[0]] + m[2:]) == -d
