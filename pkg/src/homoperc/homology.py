"""Betti numbers and ranks of inclusion-induced maps on torus homology.

The central quantity is rank(phi_*) for the inclusion phi of a random
subcomplex into the ambient torus, computed in homological dimension i.
Writing Z for the i-cycles supported on the subcomplex and B for the
ambient i-boundaries, the image of phi_* has dimension

    rank(phi_*) = dim(Z + B) - dim B = dim Z - dim(Z intersect B).

Two independent computations of this number are provided:

* ``induced_map_rank``: a two-step filtration reduction.  Order the
  ambient i-cells with the subcomplex's cells first.  dim Z is read off
  a column reduction of the i-boundary restricted to the prefix, and
  dim(Z intersect B) equals the number of lowest-row pivots of the
  reduced (i+1)-boundary that land in the prefix rows.
* ``oracle_induced_map_rank``: assembles an explicit kernel basis of the
  restricted i-boundary and measures the rank jump it adds to the
  (i+1)-boundary.  Built only from ``rank`` and ``kernel_basis``.

For i = 1 there is additionally a union-find scan over the 1-skeleton
that tracks integer displacement vectors along a spanning forest; every
non-forest edge closes a loop whose displacement, reduced mod q, spans
the image of phi_* in H_1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import (
    PrimeField,
    SparseFieldMatrix,
    _reduce_columns_dense,
    _reduce_columns_sparse,
    DENSE_ENTRY_LIMIT,
    kernel_basis,
    rank,
)

ORACLE_MAX_CELLS = 50_000


class OracleTooLargeError(ValueError):
    """The brute-force oracle refuses instances past its size bound."""


@dataclass
class FiltrationPair:
    """Ambient complex plus the membership set of its random top cells."""

    ambient: object  # complex handle: see cubical/permutohedral adapters
    sub_cells: np.ndarray  # bool mask over the model's top cells
    i: int


@dataclass
class InducedMapReport:
    rank_phi: int
    betti_sub_i: int | None  # None when a fast path does not compute it
    ambient_rank: int

    def __post_init__(self):
        if not (0 <= self.rank_phi <= self.ambient_rank):
            raise ValueError("rank_phi out of range")

    @property
    def event_A(self) -> bool:
        return self.rank_phi >= 1

    @property
    def event_S(self) -> bool:
        return self.rank_phi == self.ambient_rank

    @property
    def event_Z(self) -> bool:
        return self.rank_phi == 0


def betti(complex_handle, k: int, f: PrimeField) -> int:
    """dim ker d_k - rank d_{k+1} of the handle's chain complex."""
    n_k = complex_handle.n_cells(k)
    if n_k == 0:
        return 0
    rank_dk = 0
    if k >= 1:
        rank_dk = rank(complex_handle.boundary_matrix(k, f), f)
    rank_dk1 = 0
    if complex_handle.n_cells(k + 1) > 0:
        rank_dk1 = rank(complex_handle.boundary_matrix(k + 1, f), f)
    return n_k - rank_dk - rank_dk1


def _reduce(a_dense_or_cols, n_rows: int, q: int):
    """Dispatch to the dense or sparse column reducer; returns pivots dict."""
    if isinstance(a_dense_or_cols, np.ndarray):
        _, pivots = _reduce_columns_dense(a_dense_or_cols, q)
    else:
        _, pivots = _reduce_columns_sparse(a_dense_or_cols, n_rows, q)
    return pivots


def rank_phi_from_matrices(
    d_i: SparseFieldMatrix,
    d_ip1: SparseFieldMatrix,
    sub_i_cols: np.ndarray,
    f: PrimeField,
    ambient_rank: int,
    sub_ip1_cols: np.ndarray | None = None,
) -> InducedMapReport:
    """Two-step filtration computation of rank(phi_*).

    d_i, d_ip1: ambient boundary matrices in the canonical cell order.
    sub_i_cols: mask over i-cells selecting the subcomplex's columns.
    sub_ip1_cols: mask over (i+1)-cells of the subcomplex, or None when
    the subcomplex carries no (i+1)-cells (plaquette systems).
    """
    q = f.q
    sub_idx = np.flatnonzero(sub_i_cols)
    s = len(sub_idx)
    n_i = d_i.n_cols

    # dim Z: cycles supported on the subcomplex's i-cells.
    z = s - _restricted_column_rank(d_i, sub_idx, q)

    # dim(Z intersect B): pivots of the reduced (i+1)-boundary landing in
    # the prefix rows once i-cells are reordered subcomplex-first.
    b = 0
    if d_ip1.n_cols > 0 and z > 0:
        other_idx = np.flatnonzero(~sub_i_cols)
        row_order = np.concatenate([sub_idx, other_idx])
        new_pos = np.empty(n_i, dtype=np.int64)
        new_pos[row_order] = np.arange(n_i)
        if n_i * d_ip1.n_cols <= DENSE_ENTRY_LIMIT:
            a = d_ip1.to_dense()[row_order, :]
            pivots = _reduce(a, n_i, q)
        else:
            cols = [sorted((int(new_pos[r]), v) for r, v in col) for col in d_ip1.columns]
            pivots = _reduce(cols, n_i, q)
        b = sum(1 for r in pivots.values() if r < s)

    rank_phi = z - b
    betti_sub = z
    if sub_ip1_cols is not None and np.any(sub_ip1_cols):
        betti_sub = z - _restricted_column_rank(d_ip1, np.flatnonzero(sub_ip1_cols), q)
    return InducedMapReport(rank_phi=rank_phi, betti_sub_i=betti_sub, ambient_rank=ambient_rank)


def _restricted_column_rank(m: SparseFieldMatrix, col_idx: np.ndarray, q: int) -> int:
    if len(col_idx) == 0:
        return 0
    if m.n_rows * len(col_idx) <= DENSE_ENTRY_LIMIT:
        a = np.zeros((m.n_rows, len(col_idx)), dtype=np.int64)
        for jj, j in enumerate(col_idx):
            for r, v in m.columns[int(j)]:
                a[r, jj] = v
        pivots = _reduce(a, m.n_rows, q)
    else:
        pivots = _reduce([m.columns[int(j)] for j in col_idx], m.n_rows, q)
    return len(pivots)


def induced_map_rank(fp: FiltrationPair, f: PrimeField) -> InducedMapReport:
    """rank(phi_*) for the pair, via the handle's filtration matrices."""
    d_i, d_ip1 = fp.ambient.filtration_matrices(fp.i, f)
    sub_i, sub_ip1 = fp.ambient.induced_columns(fp.i, fp.sub_cells)
    return rank_phi_from_matrices(
        d_i, d_ip1, sub_i, f, fp.ambient.ambient_homology_rank(fp.i), sub_ip1
    )


def oracle_induced_map_rank(fp: FiltrationPair, f: PrimeField) -> int:
    """Independent computation: rank[B | Z] - rank[B].

    B is the ambient (i+1)-boundary, Z a kernel basis of the i-boundary
    restricted to the subcomplex's columns, extended by zero.  Uses only
    ``rank`` and ``kernel_basis``; shares no reduction code with the
    fast path.
    """
    n_i = fp.ambient.n_cells(fp.i)
    if n_i > ORACLE_MAX_CELLS:
        raise OracleTooLargeError(f"{n_i} i-cells exceeds oracle bound {ORACLE_MAX_CELLS}")
    d_i, d_ip1 = fp.ambient.filtration_matrices(fp.i, f)
    sub_i, _ = fp.ambient.induced_columns(fp.i, fp.sub_cells)
    sub_idx = np.flatnonzero(sub_i)
    restricted = SparseFieldMatrix(d_i.n_rows, [d_i.columns[int(j)] for j in sub_idx], f.q)
    kb = kernel_basis(restricted, f)
    z_cols = []
    for v in kb:
        col = [(int(sub_idx[jj]), int(v[jj])) for jj in np.flatnonzero(v)]
        z_cols.append(sorted(col))
    m_z = SparseFieldMatrix(d_i.n_cols, z_cols, f.q)
    m_b = SparseFieldMatrix(
        d_i.n_cols,
        [sorted(col) for col in d_ip1.columns],
        f.q,
    )
    return rank(m_b.hstack(m_z), f) - rank(m_b, f)


class DisplacementForest:
    """Union-find over graph nodes carrying Z^d displacements to the root.

    ``union(u, v, disp)`` records that v sits at position(u) + disp in
    the universal cover.  If u and v are already connected it returns
    the loop displacement (pot[u] + disp - pot[v]), the integer homology
    class of the cycle closed by this edge; otherwise None.
    """

    def __init__(self, n: int, d: int):
        self.parent = np.arange(n, dtype=np.int64)
        self.size = np.ones(n, dtype=np.int64)
        self.pot = np.zeros((n, d), dtype=np.int64)

    def find(self, x: int) -> tuple[int, np.ndarray]:
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = int(self.parent[x])
        disp = np.zeros(self.pot.shape[1], dtype=np.int64)
        for y in reversed(path):
            disp += self.pot[y]
            self.parent[y] = x
            self.pot[y] = disp
        return x, disp if path else self.pot[x] * 0

    def union(self, u: int, v: int, disp) -> np.ndarray | None:
        ru, du = self.find(u)
        rv, dv = self.find(v)
        pu = self.pot[u].copy()
        pv = self.pot[v].copy()
        if ru == rv:
            return pu + disp - pv
        # attach smaller root under larger; pot[rv] must satisfy
        # pot(v->root u) = pot(u) + disp
        if self.size[ru] < self.size[rv]:
            # attach ru under rv: pot(u -> rv) = pot(v) - disp
            self.parent[ru] = rv
            self.pot[ru] = pv - disp - pu
            self.size[rv] += self.size[ru]
        else:
            self.parent[rv] = ru
            self.pot[rv] = pu + disp - pv
            self.size[ru] += self.size[rv]
        return None


def loop_class(loop: np.ndarray, N: int) -> np.ndarray:
    """Integer homology class of a forest loop: its displacement over N.

    The deck group of the covering Z^d -> (Z/N)^d is N Z^d, so every
    loop displacement is divisible by N and the quotient is the class
    in H_1 of the torus with integer coefficients.
    """
    if (loop % N).any():
        raise RuntimeError(f"loop displacement {loop} not divisible by N={N}")
    return loop // N


class ModularSpan:
    """Incrementally maintained row space of vectors over GF(q)."""

    def __init__(self, q: int, dim: int):
        self.q = q
        self.dim = dim
        self.rows: list[np.ndarray] = []
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def insert(self, vec) -> bool:
        """Reduce vec against the span; returns True if it was new."""
        v = np.asarray(vec, dtype=np.int64) % self.q
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                v = (v - v[p] * row) % self.q
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        p = int(nz[0])
        v = (v * pow(int(v[p]), self.q - 2, self.q)) % self.q
        self.rows.append(v)
        self.pivots.append(p)
        return True
