"""Field arithmetic and the two elimination routes."""

import numpy as np
import pytest

from homoperc.fields import (
    PrimeField,
    ReductionOutcome,
    SparseFieldMatrix,
    _reduce_columns_sparse,
    filtration_reduce,
    kernel_basis,
    rank,
)


def naive_rank(a, q):
    """Brute-force dense eliminator, written independently of the library."""
    a = [[int(x) % q for x in row] for row in a]
    n_rows = len(a)
    n_cols = len(a[0]) if n_rows else 0
    r = 0
    for c in range(n_cols):
        piv = None
        for rr in range(r, n_rows):
            if a[rr][c] % q:
                piv = rr
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], q - 2, q)
        a[r] = [(x * inv) % q for x in a[r]]
        for rr in range(n_rows):
            if rr != r and a[rr][c]:
                fac = a[rr][c]
                a[rr] = [(x - fac * y) % q for x, y in zip(a[rr], a[r])]
        r += 1
    return r


def sparse(dense, q):
    return SparseFieldMatrix.from_dense(np.array(dense), PrimeField(q))


class TestPrimeField:
    def test_accepts_primes(self):
        for q in (2, 3, 5, 7, 65521):
            assert PrimeField(q).q == q

    @pytest.mark.parametrize("q", [0, 1, 4, 6, 9, 15, 2**16 + 1, 65536])
    def test_rejects_non_primes_and_large(self, q):
        with pytest.raises(ValueError):
            PrimeField(q)

    def test_inverse_table(self):
        f = PrimeField(7)
        for x in range(1, 7):
            assert (x * f.inv(x)) % 7 == 1
        with pytest.raises(ZeroDivisionError):
            f.inv(0)


class TestSparseFieldMatrix:
    def test_invariants_enforced(self):
        f = PrimeField(3)
        with pytest.raises(ValueError):
            SparseFieldMatrix(2, [[(0, 1), (0, 2)]], 3)  # repeated row
        with pytest.raises(ValueError):
            SparseFieldMatrix(2, [[(1, 1), (0, 2)]], 3)  # decreasing rows
        with pytest.raises(ValueError):
            SparseFieldMatrix(2, [[(0, 0)]], 3)  # stored zero
        with pytest.raises(ValueError):
            SparseFieldMatrix(2, [[(5, 1)]], 3)  # row out of range

    def test_dense_round_trip(self):
        f = PrimeField(5)
        a = np.array([[1, 2, 0], [0, 4, 3]])
        m = SparseFieldMatrix.from_dense(a, f)
        assert np.array_equal(m.to_dense(), a)
        assert np.array_equal(m.transpose().to_dense(), a.T)


class TestRank:
    def test_empty(self):
        f = PrimeField(3)
        assert rank(SparseFieldMatrix(0, [], 3), f) == 0

    def test_identity(self):
        f = PrimeField(3)
        assert rank(SparseFieldMatrix.identity(3, f), f) == 3

    def test_rank_depends_on_field(self):
        # [[1,2],[2,4]] has rank 1 over GF(5); entries reduce to
        # [[1,0],[0,0]] over GF(2), also rank 1.
        assert rank(sparse([[1, 2], [2, 4]], 5), PrimeField(5)) == 1
        assert rank(sparse([[1, 2], [2, 4]], 2), PrimeField(2)) == 1
        assert naive_rank([[1, 2], [2, 4]], 5) == 1
        assert naive_rank([[1, 2], [2, 4]], 2) == 1

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_matches_naive_on_random(self, q):
        rng = np.random.default_rng(7)
        f = PrimeField(q)
        for _ in range(50):
            a = rng.integers(0, q, size=(rng.integers(1, 9), rng.integers(1, 9)))
            assert rank(SparseFieldMatrix.from_dense(a, f), f) == naive_rank(a.tolist(), q)

    def test_rank_equals_transpose_rank(self):
        rng = np.random.default_rng(11)
        f = PrimeField(5)
        for _ in range(100):
            a = (rng.random((20, 20)) < 0.15) * rng.integers(1, 5, size=(20, 20))
            m = SparseFieldMatrix.from_dense(a, f)
            assert rank(m, f) == rank(m.transpose(), f)


class TestKernel:
    def test_identity_has_trivial_kernel(self):
        f = PrimeField(3)
        assert kernel_basis(SparseFieldMatrix.identity(4, f), f) == []

    def test_zero_matrix(self):
        f = PrimeField(3)
        m = SparseFieldMatrix.zeros(3, 4, f)
        kb = kernel_basis(m, f)
        assert len(kb) == 4
        for v in kb:
            assert not m.matvec(v).any()

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_rank_nullity_and_membership(self, q):
        rng = np.random.default_rng(23)
        f = PrimeField(q)
        for _ in range(40):
            a = rng.integers(0, q, size=(rng.integers(1, 8), rng.integers(1, 8)))
            m = SparseFieldMatrix.from_dense(a, f)
            kb = kernel_basis(m, f)
            assert rank(m, f) + len(kb) == m.n_cols
            for v in kb:
                assert not m.matvec(v).any()
            if kb:
                # basis vectors are independent
                stacked = SparseFieldMatrix.from_dense(np.array(kb).T, f)
                assert rank(stacked, f) == len(kb)


class TestFiltrationReduce:
    def test_already_reduced_keeps_pivots(self):
        f = PrimeField(3)
        m = sparse([[1, 0], [0, 1]], 3)
        out = filtration_reduce(m, f)
        assert out.rank == 2
        assert out.pivot_row_of_column == {0: 0, 1: 1}
        assert out.reduced_columns.to_dense().tolist() == [[1, 0], [0, 1]]

    def test_duplicate_column_cancels(self):
        f = PrimeField(3)
        m = sparse([[1, 1], [2, 2]], 3)
        out = filtration_reduce(m, f)
        assert out.rank == 1
        assert out.pivot_row_of_column == {0: 1}
        assert out.reduced_columns.columns[1] == []

    @pytest.mark.parametrize("q", [2, 3, 5])
    def test_rank_invariant_under_column_order(self, q):
        rng = np.random.default_rng(5)
        f = PrimeField(q)
        for _ in range(30):
            a = rng.integers(0, q, size=(7, 9))
            m = SparseFieldMatrix.from_dense(a, f)
            expect = rank(m, f)
            assert filtration_reduce(m, f).rank == expect
            for _ in range(3):
                perm = rng.permutation(9)
                assert filtration_reduce(m.permute_columns(perm), f).rank == expect

    def test_reduction_is_a_column_operation(self):
        # reduced columns stay in the span of the originals: ranks of all
        # column prefixes agree
        rng = np.random.default_rng(17)
        f = PrimeField(3)
        a = rng.integers(0, 3, size=(8, 10))
        m = SparseFieldMatrix.from_dense(a, f)
        out = filtration_reduce(m, f)
        for k in range(1, 11):
            pre = SparseFieldMatrix(8, m.columns[:k], 3)
            post = SparseFieldMatrix(8, out.reduced_columns.columns[:k], 3)
            assert rank(pre, f) == rank(post, f)

    def test_pivot_rows_distinct_enforced(self):
        with pytest.raises(ValueError):
            ReductionOutcome(2, {0: 1, 1: 1}, SparseFieldMatrix(2, [[(1, 1)], [(1, 1)]], 3))

    def test_sparse_engine_agrees_with_dense(self):
        rng = np.random.default_rng(29)
        f = PrimeField(5)
        for _ in range(20):
            a = (rng.random((12, 15)) < 0.3) * rng.integers(1, 5, size=(12, 15))
            m = SparseFieldMatrix.from_dense(a, f)
            dense_out = filtration_reduce(m, f)
            cols, pivots = _reduce_columns_sparse(m.columns, 12, 5)
            assert pivots == dense_out.pivot_row_of_column
            assert SparseFieldMatrix(12, cols, 5).to_dense().tolist() == \
                dense_out.reduced_columns.to_dense().tolist()

    def test_deterministic(self):
        f = PrimeField(3)
        m = sparse([[1, 2, 1], [0, 1, 1], [1, 0, 2]], 3)
        a = filtration_reduce(m, f)
        b = filtration_reduce(m, f)
        assert a.pivot_row_of_column == b.pivot_row_of_column
        assert a.reduced_columns.to_dense().tolist() == b.reduced_columns.to_dense().tolist()

    def test_jit_kernel_matches_python_fallback(self):
        from homoperc.fields import _inverse_table, _reduce_kernel_impl, _reduce_python

        rng = np.random.default_rng(41)
        for q in (2, 3, 5):
            inv = _inverse_table(q)
            for _ in range(20):
                a = rng.integers(0, q, size=(rng.integers(1, 12), rng.integers(1, 12)))
                a1 = a.astype(np.int64).copy()
                cols = np.ascontiguousarray(a.astype(np.int64).T)
                p_py = _reduce_python(a1, q, inv)
                p_k = _reduce_kernel_impl(cols, q, inv)
                assert np.array_equal(p_py, p_k)
                assert np.array_equal(a1, cols.T)
