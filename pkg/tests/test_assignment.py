import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import int_matrices
from kassign.assignment import (
    aux_matrix,
    count_assignments,
    iter_assignments,
    min_k_bruteforce,
    min_k_incremental,
    participates,
    transpose,
)
from kassign.errors import DomainError, EnumerationCapError


def one_based(sigma):
    return tuple((i + 1, j + 1) for i, j in sigma)


def test_bruteforce_examples():
    value, mins = min_k_bruteforce([[1, 2], [3, 5]], 2)
    assert value == 5
    assert [one_based(s) for s in mins] == [((1, 2), (2, 1))]

    value, mins = min_k_bruteforce([[1, 2], [3, 4]], 1)
    assert value == 1 and [one_based(s) for s in mins] == [((1, 1),)]

    value, mins = min_k_bruteforce([[0, 0, 0], [0, 0, 0]], 2)
    assert value == 0 and len(mins) == 6


def test_bruteforce_errors():
    with pytest.raises(DomainError):
        min_k_bruteforce([[1, 2]], 2)
    with pytest.raises(DomainError):
        min_k_bruteforce([[1, -2]], 1)
    with pytest.raises(EnumerationCapError):
        min_k_bruteforce([[0] * 6] * 6, 3, cap=100)


def test_count_matches_enumeration():
    for m, n, k in [(2, 3, 2), (4, 4, 3), (3, 5, 1)]:
        assert len(list(iter_assignments(m, n, k))) == count_assignments(m, n, k)


def test_aux_matrix_example():
    X = [[1, 9, 9], [9, 2, 9], [9, 9, 3]]
    Y, prov = aux_matrix(X, [0], [0])
    assert Y == ((1, 9), (9, 2))
    assert prov == {(0, 1): (0, 1), (1, 0): (1, 0), (1, 1): (1, 1)}


def test_aux_of_2x2_is_itself():
    X = [[4, 7], [6, 1]]
    Y, _ = aux_matrix(X, [0], [0])
    assert Y == ((4, 7), (6, 1))


def test_aux_corner_is_min_of_missing_column():
    X = [[5, 1, 8], [2, 6, 3], [9, 4, 7], [0, 2, 1]]
    # M spans every column except the last one
    Y, prov = aux_matrix(X, [0, 1], [0, 1])
    assert Y[2][2] == min(X[2][2], X[3][2]) == 1
    assert prov[(2, 2)] == (3, 2)


def test_aux_matrix_errors():
    with pytest.raises(DomainError):
        aux_matrix([[1, 2], [3, 4]], [0, 1], [0, 1])
    with pytest.raises(DomainError):
        aux_matrix([[1, 2, 3]] * 3, [0], [0, 1])


def test_incremental_examples():
    flag = min_k_incremental([[1, 9, 9], [9, 2, 9], [9, 9, 3]], 3)
    assert flag.rows == (0, 1, 2) and flag.cols == (0, 1, 2)
    assert flag.values == (1, 3, 6)

    flag = min_k_incremental([[0, 5], [5, 0]], 2)
    assert flag.values == (0, 0)
    assert flag.rows == (0, 1) and flag.cols == (0, 1)

    flag = min_k_incremental([[3, 1, 1], [1, 2, 0]], 1)
    assert (flag.rows, flag.cols) == ((1,), (2,))


def test_incremental_inner_cap():
    with pytest.raises(EnumerationCapError):
        min_k_incremental([[0] * 3] * 3, 3, inner_cap=2)


def test_participates_examples():
    X = [[1, 2], [3, 5]]
    assert not participates(X, 2, (0, 0))
    assert all(participates([[0] * 3] * 2, 2, (i, j)) for i in range(2) for j in range(3))
    # the only minimizer is the zero anti-diagonal, so (1,1) is excluded too
    Y = [[0, 0], [0, 1]]
    assert not participates(Y, 2, (1, 1))
    assert not participates(Y, 2, (0, 0))
    assert participates(Y, 2, (0, 1)) and participates(Y, 2, (1, 0))


@settings(max_examples=150)
@given(int_matrices(6, 6, 20), st.data())
def test_incremental_matches_bruteforce(X, data):
    m, n = len(X), len(X[0])
    k = data.draw(st.integers(1, min(m, n)))
    flag = min_k_incremental(X, k)
    for t in range(1, k + 1):
        assert flag.values[t - 1] == min_k_bruteforce(X, t)[0]
        rows, cols = flag.submatrix(t)
        sub_best = min(
            sum(X[i][j] for i, j in s)
            for s in iter_assignments(m, n, t, rows, cols)
        )
        assert sub_best == flag.values[t - 1]
    assert list(flag.values) == sorted(flag.values)


def _span_contains(big, small):
    rows = {i for i, _ in big}
    cols = {j for _, j in big}
    return all(i in rows and j in cols for i, j in small)


def check_nesting(X):
    m, n = len(X), len(X[0])
    mins = {k: min_k_bruteforce(X, k)[1] for k in range(1, min(m, n) + 1)}
    for k1 in mins:
        for k2 in mins:
            if k2 <= k1:
                continue
            for s in mins[k1]:
                assert any(_span_contains(t, s) for t in mins[k2])
            for t in mins[k2]:
                assert any(_span_contains(t, s) for s in mins[k1])


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(0, 3), min_size=4, max_size=4), min_size=4, max_size=4))
def test_nesting_with_ties(X):
    check_nesting(X)


def check_aux_correspondence(X):
    m, n = len(X), len(X[0])
    for t in range(2, min(m, n) + 1):
        flag = min_k_incremental(X, t - 1)
        rows, cols = list(flag.rows), list(flag.cols)
        Y, prov = aux_matrix(X, rows, cols)
        value, aux_mins = min_k_bruteforce(Y, t)
        assert value == min_k_bruteforce(X, t)[0]
        for sigma in aux_mins:
            mapped = []
            for a, b in sigma:
                if (a, b) in prov:
                    mapped.append(prov[(a, b)])
                else:
                    mapped.append((rows[a], cols[b]))
            assert len({i for i, _ in mapped}) == t
            assert len({j for _, j in mapped}) == t
            assert sum(X[i][j] for i, j in mapped) == value


@settings(max_examples=80)
@given(int_matrices(5, 5, 9))
def test_aux_minimizers_lift_to_minimizers(X):
    check_aux_correspondence(X)


@given(int_matrices(4, 5, 9), st.data())
def test_transpose_symmetry(X, data):
    k = data.draw(st.integers(1, min(len(X), len(X[0]))))
    assert min_k_bruteforce(X, k)[0] == min_k_bruteforce(transpose(X), k)[0]


def test_generic_scalar_fraction_and_float():
    rng = random.Random(4)
    X = [[Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(4)] for _ in range(3)]
    exact = min_k_bruteforce(X, 3)[0]
    approx = min_k_bruteforce([[float(x) for x in row] for row in X], 3)[0]
    assert isinstance(exact, Fraction)
    assert approx == pytest.approx(float(exact))
