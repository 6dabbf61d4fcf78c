"""Exact linear algebra over prime fields GF(q).

Two independent elimination routes are provided on purpose:

* ``rank`` / ``kernel_basis`` run a dense row-echelon elimination
  (leftmost-pivot convention, numpy-vectorized row operations).
* ``filtration_reduce`` runs the left-to-right column reduction with
  *lowest-row* pivots (the persistence convention) needed to read off
  two-step filtration ranks.

They share nothing beyond modular scalar arithmetic, so each can serve
as a cross-check of the other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

try:  # optional: ~50x on the column-reduction hot loop
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

# Above this many dense entries the column reduction switches to the
# dict-of-columns sparse path instead of materializing the matrix.
DENSE_ENTRY_LIMIT = 40_000_000


class PrimeField:
    """Arithmetic mod a prime q, with q < 2**16 (small-field assumption)."""

    def __init__(self, q: int):
        if not isinstance(q, (int, np.integer)):
            raise TypeError("modulus must be an integer")
        q = int(q)
        if q < 2 or q >= 2**16:
            raise ValueError(f"modulus must be a prime in [2, 2^16), got {q}")
        if not _is_prime(q):
            raise ValueError(f"modulus {q} is not prime")
        self.q = q
        self._inv = None  # lazy inverse table

    def normalize(self, x: int) -> int:
        return x % self.q

    def neg(self, x: int) -> int:
        return (-x) % self.q

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def inv(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        if self._inv is None:
            self._inv = self._build_inverse_table()
        return int(self._inv[x])

    def _build_inverse_table(self) -> np.ndarray:
        # x^(q-2) = x^-1; a table beats repeated pow() for q this small.
        table = np.zeros(self.q, dtype=np.int64)
        for x in range(1, self.q):
            table[x] = pow(x, self.q - 2, self.q)
        return table

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("PrimeField", self.q))

    def __repr__(self):
        return f"PrimeField({self.q})"


def _is_prime(n: int) -> bool:
    """Trial division; q is small by construction."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


class SparseFieldMatrix:
    """Column-sparse matrix over GF(q).

    ``columns[j]`` is a list of ``(row, value)`` pairs with strictly
    increasing row indices and values in [1, q).
    """

    def __init__(self, n_rows: int, columns: list[list[tuple[int, int]]], q: int):
        self.n_rows = int(n_rows)
        self.q = int(q)
        self.columns = columns
        self._validate()

    def _validate(self):
        if self.n_rows < 0:
            raise ValueError("negative row count")
        for j, col in enumerate(self.columns):
            prev = -1
            for r, v in col:
                if not (0 <= r < self.n_rows):
                    raise ValueError(f"column {j}: row {r} out of range")
                if r <= prev:
                    raise ValueError(f"column {j}: rows not strictly increasing")
                if not (1 <= v < self.q):
                    raise ValueError(f"column {j}: value {v} not in [1, q)")
                prev = r

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    @classmethod
    def from_dense(cls, a, field: PrimeField) -> "SparseFieldMatrix":
        a = np.asarray(a, dtype=np.int64) % field.q
        cols = []
        for j in range(a.shape[1]):
            rows = np.flatnonzero(a[:, j])
            cols.append([(int(r), int(a[r, j])) for r in rows])
        return cls(a.shape[0], cols, field.q)

    @classmethod
    def identity(cls, n: int, field: PrimeField) -> "SparseFieldMatrix":
        return cls(n, [[(j, 1)] for j in range(n)], field.q)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int, field: PrimeField) -> "SparseFieldMatrix":
        return cls(n_rows, [[] for _ in range(n_cols)], field.q)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        for j, col in enumerate(self.columns):
            for r, v in col:
                a[r, j] = v
        return a

    def transpose(self) -> "SparseFieldMatrix":
        cols: list[list[tuple[int, int]]] = [[] for _ in range(self.n_rows)]
        for j, col in enumerate(self.columns):
            for r, v in col:
                cols[r].append((j, v))
        return SparseFieldMatrix(self.n_cols, cols, self.q)

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64) % self.q
        out = np.zeros(self.n_rows, dtype=np.int64)
        for j, col in enumerate(self.columns):
            if v[j]:
                for r, val in col:
                    out[r] = (out[r] + val * v[j]) % self.q
        return out

    def permute_columns(self, order) -> "SparseFieldMatrix":
        return SparseFieldMatrix(self.n_rows, [self.columns[j] for j in order], self.q)

    def hstack(self, other: "SparseFieldMatrix") -> "SparseFieldMatrix":
        if other.n_rows != self.n_rows or other.q != self.q:
            raise ValueError("incompatible matrices")
        return SparseFieldMatrix(self.n_rows, self.columns + other.columns, self.q)

    def __eq__(self, other):
        return (
            isinstance(other, SparseFieldMatrix)
            and self.n_rows == other.n_rows
            and self.q == other.q
            and self.columns == other.columns
        )

    def __repr__(self):
        return f"SparseFieldMatrix({self.n_rows}x{self.n_cols} over GF({self.q}))"


@dataclass
class ReductionOutcome:
    """Result of the left-to-right column reduction."""

    rank: int
    pivot_row_of_column: dict[int, int]
    reduced_columns: SparseFieldMatrix

    def __post_init__(self):
        rows = list(self.pivot_row_of_column.values())
        if len(rows) != len(set(rows)):
            raise ValueError("pivot rows not pairwise distinct")
        if self.rank != len(self.pivot_row_of_column):
            raise ValueError("rank must equal number of pivot columns")


def rank(m: SparseFieldMatrix, f: PrimeField) -> int:
    """Rank of m over GF(q), by dense row-echelon elimination."""
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    a = m.to_dense() % f.q
    return _row_echelon(a, f.q)[1]


def kernel_basis(m: SparseFieldMatrix, f: PrimeField) -> list[np.ndarray]:
    """Basis of the null space of m; each vector v satisfies m v = 0.

    Returned vectors have length n_cols; there are n_cols - rank(m) of them.
    """
    n = m.n_cols
    if n == 0:
        return []
    if m.n_rows == 0:
        return [_unit_vector(n, j) for j in range(n)]
    a = m.to_dense() % f.q
    red, r, pivot_cols = _row_echelon(a, f.q, reduced=True)
    pivot_set = set(pivot_cols)
    free_cols = [j for j in range(n) if j not in pivot_set]
    basis = []
    for j in free_cols:
        v = np.zeros(n, dtype=np.int64)
        v[j] = 1
        # back-substitute: pivot variable of row k is pivot_cols[k]
        for k in range(r):
            v[pivot_cols[k]] = (-red[k, j]) % f.q
        basis.append(v)
    return basis


def _unit_vector(n, j):
    v = np.zeros(n, dtype=np.int64)
    v[j] = 1
    return v


def _row_echelon(a: np.ndarray, q: int, reduced: bool = False):
    """In-place row elimination mod q; returns (matrix, rank, pivot_cols)."""
    a = a % q
    n_rows, n_cols = a.shape
    pivot_cols = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        p = r + int(nz[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        inv = pow(int(a[r, c]), q - 2, q)
        a[r] = (a[r] * inv) % q
        rows = np.flatnonzero(a[r + 1:, c])
        if rows.size:
            rows = rows + r + 1
            a[rows] = (a[rows] - np.outer(a[rows, c], a[r])) % q
        pivot_cols.append(c)
        r += 1
    if reduced:
        for k in range(len(pivot_cols) - 1, -1, -1):
            c = pivot_cols[k]
            rows = np.flatnonzero(a[:k, c])
            if rows.size:
                a[rows] = (a[rows] - np.outer(a[rows, c], a[k])) % q
    return a, r, pivot_cols


def filtration_reduce(m: SparseFieldMatrix, f: PrimeField) -> ReductionOutcome:
    """Left-to-right column reduction with lowest-row pivots.

    Column j is repeatedly reduced by earlier columns whose pivot row
    matches its lowest nonzero row, until that row is unclaimed or the
    column vanishes.  Column order is part of the input; permuting
    columns changes the pivots but never the rank.
    """
    q = f.q
    if m.q != q:
        m = SparseFieldMatrix.from_dense(m.to_dense(), f)
    n_rows, n_cols = m.shape
    if n_rows * max(n_cols, 1) <= DENSE_ENTRY_LIMIT:
        red, pivots = _reduce_columns_dense(m.to_dense(), q)
        reduced = SparseFieldMatrix.from_dense(red, f)
    else:
        cols, pivots = _reduce_columns_sparse(m.columns, n_rows, q)
        reduced = SparseFieldMatrix(n_rows, cols, q)
    pivot_map = {j: r for j, r in pivots.items()}
    return ReductionOutcome(rank=len(pivot_map), pivot_row_of_column=pivot_map, reduced_columns=reduced)


@lru_cache(maxsize=None)
def _inverse_table(q: int) -> np.ndarray:
    table = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        table[x] = pow(x, q - 2, q)
    table.setflags(write=False)
    return table


def _reduce_columns_dense(a: np.ndarray, q: int):
    """Dense engine behind filtration_reduce; returns (reduced, {col: pivot_row})."""
    a = a.astype(np.int64) % q
    n_rows, n_cols = a.shape
    if n_rows == 0 or n_cols == 0:
        return a, {}
    inv = _inverse_table(q)
    if njit is not None:
        cols = np.ascontiguousarray(a.T)
        pivot_rows = _reduce_kernel(cols, q, inv)
        a = cols.T.copy()
    else:
        pivot_rows = _reduce_python(a, q, inv)
    pivots = {j: int(r) for j, r in enumerate(pivot_rows) if r >= 0}
    return a, pivots


def _reduce_python(a: np.ndarray, q: int, inv: np.ndarray) -> np.ndarray:
    owner = np.full(a.shape[0], -1, dtype=np.int64)  # pivot row -> owning column
    pivot_rows = np.full(a.shape[1], -1, dtype=np.int64)
    for j in range(a.shape[1]):
        col = a[:, j]
        nz = np.flatnonzero(col)
        while nz.size:
            low = int(nz[-1])
            k = owner[low]
            if k < 0:
                owner[low] = j
                pivot_rows[j] = low
                break
            c = (col[low] * inv[a[low, k]]) % q
            col -= c * a[:, k]
            col %= q
            nz = np.flatnonzero(col)
    return pivot_rows


def _reduce_kernel_impl(cols, q, inv):
    # cols is (n_cols, n_rows), each column contiguous
    n_cols, n_rows = cols.shape
    owner = np.full(n_rows, -1, np.int64)
    pivot_rows = np.full(n_cols, -1, np.int64)
    for j in range(n_cols):
        low = -1
        for r in range(n_rows - 1, -1, -1):
            if cols[j, r] != 0:
                low = r
                break
        while low >= 0:
            k = owner[low]
            if k < 0:
                owner[low] = j
                pivot_rows[j] = low
                break
            c = (cols[j, low] * inv[cols[k, low]]) % q
            newlow = -1
            for r in range(low, -1, -1):
                v = (cols[j, r] - c * cols[k, r]) % q
                cols[j, r] = v
                if newlow == -1 and v != 0 and r != low:
                    newlow = r
            low = newlow
    return pivot_rows


if njit is not None:
    _reduce_kernel = njit(cache=True)(_reduce_kernel_impl)
else:  # pragma: no cover
    _reduce_kernel = _reduce_kernel_impl


def _reduce_columns_sparse(columns, n_rows: int, q: int):
    """Sparse engine: columns as dicts row->value; same pivot convention."""
    inv = [0] * q
    for x in range(1, q):
        inv[x] = pow(x, q - 2, q)
    work = [dict(col) for col in columns]
    owner: dict[int, int] = {}
    pivots: dict[int, int] = {}
    for j, col in enumerate(work):
        while col:
            low = max(col)
            k = owner.get(low)
            if k is None:
                owner[low] = j
                pivots[j] = low
                break
            other = work[k]
            c = (col[low] * inv[other[low]]) % q
            for r, v in other.items():
                nv = (col.get(r, 0) - c * v) % q
                if nv:
                    col[r] = nv
                elif r in col:
                    del col[r]
        work[j] = col
    out = [sorted(col.items()) for col in work]
    return out, pivots


def column_rank_profile(m: SparseFieldMatrix, f: PrimeField, prefix: int) -> tuple[int, int]:
    """(rank of the first `prefix` columns, rank of all columns), one reduction."""
    out = filtration_reduce(m, f)
    in_prefix = sum(1 for j in out.pivot_row_of_column if j < prefix)
    return in_prefix, out.rank
