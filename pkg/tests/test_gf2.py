import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rcldpc.errors import DimensionMismatch, IndexOutOfRange, ParseError, SingularMatrix
from rcldpc.gf2 import BitMatrix, from_alist, invert, multiply, rank, to_alist
from rcldpc.scaffold import build_dual_diagonal


def dense_rank(a):
    """Plain row reduction over GF(2) on a dense copy."""
    a = np.array(a, dtype=np.uint8) % 2
    r = 0
    for c in range(a.shape[1]):
        piv = next((i for i in range(r, a.shape[0]) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(a.shape[0]):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


def naive_product(a, b):
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            s = 0
            for t in range(a.shape[1]):
                s ^= int(a[i, t]) & int(b[t, j])
            out[i, j] = s
    return out


def test_rank_identity_and_all_ones():
    assert rank(BitMatrix.identity(3)) == 3
    assert rank(BitMatrix.from_dense(np.ones((2, 2)))) == 1


def test_rank_random_matches_dense_oracle():
    rng = np.random.default_rng(1)
    a = (rng.random((8, 8)) < 0.4).astype(np.uint8)
    assert rank(BitMatrix.from_dense(a)) == dense_rank(a)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_rank_property(r, c, seed):
    a = (np.random.default_rng(seed).random((r, c)) < 0.5).astype(np.uint8)
    assert rank(BitMatrix.from_dense(a)) == dense_rank(a)


def test_inverse_of_dual_diagonal_is_lower_triangular_ones():
    inv = invert(build_dual_diagonal(4))
    expected = np.tril(np.ones((4, 4), dtype=np.uint8))
    assert np.array_equal(inv.to_dense(), expected)
    # its transpose is the upper-triangular accumulator pattern
    assert np.array_equal(inv.T.to_dense(), np.triu(np.ones((4, 4), dtype=np.uint8)))


def test_invert_identity_and_singular():
    assert invert(BitMatrix.identity(5)) == BitMatrix.identity(5)
    with pytest.raises(SingularMatrix):
        invert(BitMatrix.from_dense([[1, 0, 1], [1, 0, 1], [0, 1, 0]]))
    with pytest.raises(DimensionMismatch):
        invert(BitMatrix.zeros(2, 3))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_invert_round_trip(n, seed):
    a = (np.random.default_rng(seed).random((n, n)) < 0.5).astype(np.uint8)
    m = BitMatrix.from_dense(a)
    if dense_rank(a) < n:
        with pytest.raises(SingularMatrix):
            invert(m)
    else:
        assert multiply(m, invert(m)) == BitMatrix.identity(n)
        assert multiply(invert(m), m) == BitMatrix.identity(n)


def test_multiply_identity_inverse_and_naive_oracle():
    dd = build_dual_diagonal(4)
    assert multiply(BitMatrix.identity(4), dd) == dd
    assert multiply(dd, invert(dd)) == BitMatrix.identity(4)
    rng = np.random.default_rng(2)
    a, b = (rng.random((5, 5)) < 0.5).astype(np.uint8), (rng.random((5, 5)) < 0.5).astype(np.uint8)
    got = multiply(BitMatrix.from_dense(a), BitMatrix.from_dense(b)).to_dense()
    assert np.array_equal(got, naive_product(a, b))


def test_multiply_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        multiply(BitMatrix.zeros(2, 3), BitMatrix.zeros(2, 3))


def test_construction_validation():
    with pytest.raises(ValueError):
        BitMatrix.from_rows(2, 2, [[0, 0], [1]])
    with pytest.raises(ValueError):
        BitMatrix.from_rows(2, 2, [[2], [1]])


def test_transpose_and_views():
    rng = np.random.default_rng(4)
    a = (rng.random((6, 9)) < 0.3).astype(np.uint8)
    m = BitMatrix.from_dense(a)
    assert np.array_equal(m.T.to_dense(), a.T)
    assert np.array_equal(m.to_csr().toarray(), a)
    assert np.array_equal(m.column_weights(), a.sum(axis=0))
    assert np.array_equal(m.select_columns([3, 0]).to_dense(), a[:, [3, 0]])
    assert m.check_consistency()


def test_alist_identity_format():
    text = to_alist(BitMatrix.identity(2))
    lines = text.splitlines()
    assert lines[0].split() == ["2", "2"]
    assert lines[1].split() == ["1", "1"]
    assert lines[2].split() == ["1", "1"]
    assert lines[3].split() == ["1", "1"]
    assert [ln.split() for ln in lines[4:]] == [["1"], ["2"], ["1"], ["2"]]


def test_alist_round_trip():
    dd = build_dual_diagonal(4)
    assert from_alist(to_alist(dd)) == dd
    rng = np.random.default_rng(9)
    m = BitMatrix.from_dense((rng.random((7, 11)) < 0.3).astype(np.uint8))
    assert from_alist(to_alist(m)) == m


# 3 columns x 2 rows; column 2 has weight 1 and must be padded with a 0
GOOD = "3 2\n2 3\n2 2 1\n2 3\n1 2\n1 2\n2 0\n1 2 0\n1 2 3\n"


def test_alist_hand_fixture():
    m = from_alist(GOOD)
    assert m.to_dense().tolist() == [[1, 1, 0], [1, 1, 1]]


def test_alist_missing_padding():
    bad = GOOD.replace("2 0\n", "2\n", 1)
    with pytest.raises(ParseError) as exc:
        from_alist(bad)
    assert "line 7" in str(exc.value)


def test_alist_rejects_duplicates_range_and_inconsistency():
    with pytest.raises(ParseError):
        from_alist(GOOD.replace("1 2\n1 2\n2 0\n", "1 1\n1 2\n2 0\n", 1))
    with pytest.raises(ParseError):
        # row list disagrees with the column lists
        from_alist(GOOD.replace("1 2 0\n", "1 3 0\n", 1))
    with pytest.raises(IndexOutOfRange):
        from_alist(GOOD.replace("2 0\n", "5 0\n", 1))
    with pytest.raises(ParseError):
        from_alist(GOOD[: GOOD.rfind("1 2 3\n")])
    with pytest.raises(ParseError):
        from_alist(GOOD + "9 9\n")
