"""The regular cubical complex on the d-torus and its half-shift dual.

Cells are pairs (anchor, dirs): the k-cell anchored at a vertex of
(Z/N)^d and spanning the unit directions in ``dirs``.  The canonical
cell order is lexicographic by (dirs, anchor); all boundary matrices
and membership masks index cells in this order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np

from .fields import PrimeField, SparseFieldMatrix


@dataclass(frozen=True)
class TorusSpec:
    """Side length N torus in dimension d with plaquette dimension i."""

    d: int
    N: int
    i: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        # For N <= 2 distinct boundary terms of one cell coincide mod N,
        # so the complex is no longer regular.
        if self.N < 3:
            raise ValueError("N must be >= 3")
        if not (1 <= self.i <= self.d - 1):
            raise ValueError("i must satisfy 1 <= i <= d-1")

    def n_cells(self, k: int) -> int:
        if not (0 <= k <= self.d):
            raise ValueError(f"cell dimension {k} out of range 0..{self.d}")
        return comb(self.d, k) * self.N**self.d


@dataclass(frozen=True)
class CubicalCell:
    """k-cell (anchor, dirs); dirs is a sorted tuple of 1-based directions."""

    anchor: tuple[int, ...]
    dirs: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.dirs)


@dataclass
class SignedChain:
    """Formal GF(q) combination of cells; no duplicates, no zero scalars."""

    terms: list[tuple[CubicalCell, int]]


def direction_sets(d: int, k: int) -> list[tuple[int, ...]]:
    """All k-subsets of {1..d} in lexicographic order."""
    return list(itertools.combinations(range(1, d + 1), k))


def enumerate_cells(spec: TorusSpec, k: int) -> list[CubicalCell]:
    """All k-cells in canonical (dirs lex, anchor lex) order."""
    n = spec.n_cells(k)  # validates k
    cells = []
    anchors = list(itertools.product(range(spec.N), repeat=spec.d))
    for dirs in direction_sets(spec.d, k):
        for anchor in anchors:
            cells.append(CubicalCell(anchor, dirs))
    assert len(cells) == n
    return cells


def cell_index(spec: TorusSpec, cell: CubicalCell) -> int:
    """Position of cell in the canonical order, computed arithmetically."""
    d, N = spec.d, spec.N
    k = len(cell.dirs)
    dirs_rank = _combination_rank(cell.dirs, d)
    anchor_rank = 0
    for a in cell.anchor:
        anchor_rank = anchor_rank * N + (a % N)
    return dirs_rank * N**d + anchor_rank


def _combination_rank(dirs: tuple[int, ...], d: int) -> int:
    """Lexicographic rank of a sorted k-subset of {1..d}."""
    k = len(dirs)
    rank = 0
    prev = 0
    for pos, v in enumerate(dirs):
        for w in range(prev + 1, v):
            rank += comb(d - w, k - pos - 1)
        prev = v
    return rank


def boundary(cell: CubicalCell, spec: TorusSpec, f: PrimeField) -> SignedChain:
    """Cubical boundary with the standard alternating-sign convention.

    d(v, S) = sum_{j in S} (-1)^{pos(j,S)} [ (v+e_j, S\\{j}) - (v, S\\{j}) ].
    """
    terms = []
    N = spec.N
    for pos, j in enumerate(cell.dirs):
        sub = tuple(x for x in cell.dirs if x != j)
        sign = 1 if pos % 2 == 0 else f.q - 1
        shifted = list(cell.anchor)
        shifted[j - 1] = (shifted[j - 1] + 1) % N
        terms.append((CubicalCell(tuple(shifted), sub), sign))
        terms.append((CubicalCell(cell.anchor, sub), f.neg(sign)))
    return SignedChain(terms)


def dual_cell(cell: CubicalCell, spec: TorusSpec) -> CubicalCell:
    """The unique (d-k)-cell of the half-shifted complex meeting cell at its center.

    With the shifted complex re-identified with the torus, the map is
    (v, S) -> (v - 1_{S^c} mod N, S^c).  It reverses incidence, and
    applying it twice translates the anchor by -1 in every coordinate.
    """
    comp = tuple(j for j in range(1, spec.d + 1) if j not in cell.dirs)
    anchor = list(cell.anchor)
    for j in comp:
        anchor[j - 1] = (anchor[j - 1] - 1) % spec.N
    return CubicalCell(tuple(anchor), comp)


def is_face(sub: CubicalCell, sup: CubicalCell, spec: TorusSpec) -> bool:
    """Whether sub is a face of the closed cell sup (any codimension)."""
    if not set(sub.dirs) <= set(sup.dirs):
        return False
    free = set(sup.dirs) - set(sub.dirs)
    for j in range(1, spec.d + 1):
        diff = (sub.anchor[j - 1] - sup.anchor[j - 1]) % spec.N
        if j in free:
            if diff not in (0, 1):
                return False
        elif diff != 0:
            return False
    return True


def boundary_matrix(spec: TorusSpec, k: int, f: PrimeField) -> SparseFieldMatrix:
    """Matrix of the boundary operator: rows (k-1)-cells, columns k-cells."""
    if not (1 <= k <= spec.d):
        raise ValueError(f"boundary defined for 1 <= k <= {spec.d}, got {k}")
    n_rows = spec.n_cells(k - 1)
    cols = []
    for cell in enumerate_cells(spec, k):
        entries: dict[int, int] = {}
        for face, coeff in boundary(cell, spec, f).terms:
            r = cell_index(spec, face)
            val = (entries.get(r, 0) + coeff) % f.q
            if val:
                entries[r] = val
            elif r in entries:
                del entries[r]
        cols.append(sorted(entries.items()))
    return SparseFieldMatrix(n_rows, cols, f.q)


def dual_index_map(spec: TorusSpec, k: int) -> np.ndarray:
    """index of delta(cell) among (d-k)-cells, for each k-cell index."""
    cells = enumerate_cells(spec, k)
    out = np.empty(len(cells), dtype=np.int64)
    for idx, cell in enumerate(cells):
        out[idx] = cell_index(spec, dual_cell(cell, spec))
    return out


def translate_mask(spec: TorusSpec, k: int, mask: np.ndarray, shift: tuple[int, ...]) -> np.ndarray:
    """Membership mask for the k-cell set translated by a lattice vector."""
    cells = enumerate_cells(spec, k)
    out = np.zeros_like(mask)
    for idx, cell in enumerate(cells):
        if mask[idx]:
            moved = tuple((a + s) % spec.N for a, s in zip(cell.anchor, shift))
            out[cell_index(spec, CubicalCell(moved, cell.dirs))] = True
    return out


def system_dual_cell(cell: CubicalCell, spec: TorusSpec) -> CubicalCell:
    """Self-inverse variant of the duality pairing, used for dual systems.

    dual_cell composed with itself is the translation by -1, so it is
    not an involution on cell labels.  Composing it with the point
    reflection x -> -x (a cellular automorphism of the torus) gives
    (v, S) -> (-v - 1 mod N, S^c), which is exactly self-inverse, still
    swaps k-cells with (d-k)-cells and still reverses incidence.  All
    rank identities are unaffected: the two pairings differ by a torus
    symmetry.
    """
    comp = tuple(j for j in range(1, spec.d + 1) if j not in cell.dirs)
    anchor = tuple((-a - 1) % spec.N for a in cell.anchor)
    return CubicalCell(anchor, comp)


def system_dual_index_map(spec: TorusSpec, k: int) -> np.ndarray:
    """index of the system-dual partner among (d-k)-cells, per k-cell index."""
    cells = enumerate_cells(spec, k)
    out = np.empty(len(cells), dtype=np.int64)
    for idx, cell in enumerate(cells):
        out[idx] = cell_index(spec, system_dual_cell(cell, spec))
    return out


class CubicalComplexHandle:
    """Cached boundary matrices and masks for one torus, engine-facing.

    Implements the complex-handle protocol consumed by the homology
    module: n_cells / boundary_matrix / filtration_matrices /
    induced_columns / ambient_homology_rank.  The random top cells of a
    plaquette system are the i-cells themselves, and the subcomplex
    always contains the full (i-1)-skeleton, so induced_columns is the
    identity on the membership mask with no (i+1)-content.
    """

    def __init__(self, spec: TorusSpec):
        self.spec = spec
        self._bnd: dict[tuple[int, int], SparseFieldMatrix] = {}
        self._dual_maps: dict[int, np.ndarray] = {}

    def n_cells(self, k: int) -> int:
        if k < 0 or k > self.spec.d:
            return 0
        return self.spec.n_cells(k)

    def boundary_matrix(self, k: int, f: PrimeField) -> SparseFieldMatrix:
        key = (k, f.q)
        if key not in self._bnd:
            self._bnd[key] = boundary_matrix(self.spec, k, f)
        return self._bnd[key]

    def filtration_matrices(self, i: int, f: PrimeField):
        return self.boundary_matrix(i, f), self.boundary_matrix(i + 1, f)

    def induced_columns(self, i: int, sub_cells: np.ndarray):
        if i != self.spec.i:
            raise ValueError(f"membership mask is over {self.spec.i}-cells, not {i}-cells")
        return sub_cells, None

    def ambient_homology_rank(self, i: int) -> int:
        return comb(self.spec.d, i)

    def system_dual_map(self, k: int) -> np.ndarray:
        if k not in self._dual_maps:
            self._dual_maps[k] = system_dual_index_map(self.spec, k)
        return self._dual_maps[k]
