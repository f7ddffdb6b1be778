import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from influx.gf import make_rng, random_prime
from influx.linalg import FieldMatrix, Singular, det, int_det_bareiss, int_rank_bareiss, lu_invert, rank

P = (1 << 61) - 1
small_ints = st.integers(-4, 4)


def square(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


def test_inverse_times_matrix_is_identity():
    A = FieldMatrix.from_ints([[2, 1, 0], [1, 3, 1], [0, 1, 4]], P)
    assert A @ lu_invert(A) == FieldMatrix.identity(3, P)


def test_singular_matrix():
    A = FieldMatrix.from_ints([[1, 2], [2, 4]], P)
    assert det(A) == 0 and rank(A) == 1
    with pytest.raises(Singular):
        lu_invert(A)


def test_bareiss_known_values():
    assert int_det_bareiss([[0, 1], [1, 0]]) == -1
    assert int_det_bareiss([[2, -1, 0], [-1, 2, -1], [0, -1, 2]]) == 4
    assert int_det_bareiss([]) == 1
    assert int_rank_bareiss([[1, 2, 3], [2, 4, 6]]) == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 5).flatmap(square))
def test_bareiss_agrees_with_modular_det_for_three_primes(rows):
    exact = int_det_bareiss(rows)
    assert exact == round(np.linalg.det(np.array(rows, dtype=float)))
    rng = make_rng(len(rows))
    for _ in range(3):
        p = random_prime(64, rng).p
        assert det(FieldMatrix.from_ints(rows, p)) == exact % p


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(square(n), square(n))))
def test_det_is_multiplicative(pair):
    a, b = (FieldMatrix.from_ints(x, P) for x in pair)
    assert det(a @ b) == det(a) * det(b) % P


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=1, max_size=5)))
def test_rank_agrees_with_numpy(rows):
    expected = int(np.linalg.matrix_rank(np.array(rows, dtype=float)))
    assert int_rank_bareiss(rows) == expected
    assert rank(FieldMatrix.from_ints(rows, P)) == expected
