"""Permutohedral tiling of the d-torus and its nerve as a clique complex.

Sites are points of the lattice spanned by b_k = e_k - (1/(d+1)) * 1
inside the sum-zero hyperplane of R^(d+1), stored as integer coordinate
vectors with respect to that basis, mod N.  Two sites are adjacent
exactly when their permutohedra share a facet; facets correspond to the
nonempty proper subsets A of {1..d+1}, and the neighbor across facet A
sits at the lattice vector with scaled ambient representative

    w_A = (d+1) e_A - |A| 1.

Working in basis coordinates this is the 0/1 indicator of A (or minus
the indicator of its complement), but the offsets are derived here by
solving the change-of-basis system exactly over the rationals and
verifying integrality, not by assuming the closed form.

The nerve of the tiling is realized as the clique complex of the site
adjacency graph: in general position a (d-k)-cell of the tiling lies in
exactly k+1 permutohedra, so simplices and cliques coincide.  On the
quotient torus this identification additionally requires that every
clique of the quotient graph lifts to a clique of the infinite lattice;
``validate_torus`` checks the triangle-level lifting condition, which
fails for N = 3 (three cells in a line are pairwise adjacent mod 3 but
share no point) and holds for all N >= 4.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .fields import PrimeField, SparseFieldMatrix


class BudgetExceededError(ValueError):
    """Simplex enumeration crossed the configured cell budget."""


@dataclass(frozen=True)
class AdjacencyOffset:
    """Facet subset A, scaled ambient vector w_A, and basis coordinates."""

    subset_a: frozenset[int]
    ambient: tuple[int, ...]
    offset: tuple[int, ...]


def _basis_ambient(d: int) -> list[tuple[int, ...]]:
    """Scaled ambient representatives (d+1) b_k of the lattice basis."""
    vecs = []
    for k in range(1, d + 1):
        v = [-1] * (d + 1)
        v[k - 1] += d + 1
        vecs.append(tuple(v))
    return vecs


def _solve_rational(basis: list[tuple[int, ...]], target: tuple[int, ...]) -> list[Fraction]:
    """Solve sum_k c_k basis_k = target exactly; raises if inconsistent."""
    n_eq = len(target)
    n_var = len(basis)
    aug = [[Fraction(basis[k][r]) for k in range(n_var)] + [Fraction(target[r])] for r in range(n_eq)]
    row = 0
    where = [-1] * n_var
    for c in range(n_var):
        piv = next((r for r in range(row, n_eq) if aug[r][c] != 0), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        inv = 1 / aug[row][c]
        aug[row] = [x * inv for x in aug[row]]
        for r in range(n_eq):
            if r != row and aug[r][c] != 0:
                factor = aug[r][c]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[row])]
        where[c] = row
        row += 1
    for r in range(row, n_eq):
        if aug[r][n_var] != 0:
            raise ValueError("inconsistent change-of-basis system")
    return [aug[where[c]][n_var] if where[c] >= 0 else Fraction(0) for c in range(n_var)]


def adjacency_offsets(d: int) -> list[AdjacencyOffset]:
    """All 2^(d+1)-2 facet offsets, in bitmask order of the subset A."""
    if d < 2:
        raise ValueError("d must be >= 2")
    basis = _basis_ambient(d)
    out = []
    for bits in range(1, 2 ** (d + 1) - 1):
        a = frozenset(j + 1 for j in range(d + 1) if bits >> j & 1)
        w = tuple((d + 1) * (1 if j + 1 in a else 0) - len(a) for j in range(d + 1))
        if sum(w) != 0:
            raise AssertionError("ambient representative leaves the hyperplane")
        # w/(d+1) must pair integrally with the root lattice generators.
        for j in range(d):
            if (w[j] - w[j + 1]) % (d + 1) != 0:
                raise AssertionError("offset not in the dual lattice")
        coeffs = _solve_rational(basis, w)
        if any(c.denominator != 1 for c in coeffs):
            raise AssertionError("change-of-basis solution not integral")
        offset = tuple(int(c) for c in coeffs)
        check = [sum(offset[k] * basis[k][r] for k in range(d)) for r in range(d + 1)]
        if tuple(check) != w:
            raise AssertionError("offset verification failed")
        out.append(AdjacencyOffset(subset_a=a, ambient=w, offset=offset))
    return out


def offset_vectors(d: int) -> np.ndarray:
    """(2^(d+1)-2, d) integer array of basis-coordinate offsets."""
    return np.array([o.offset for o in adjacency_offsets(d)], dtype=np.int64)


def validate_torus(d: int, N: int) -> list[str]:
    """Reasons the (d, N) quotient is unsound for the nerve construction."""
    problems = []
    if d < 2:
        problems.append("d must be >= 2")
        return problems
    if N < 2:
        problems.append("N must be >= 2")
        return problems
    offs = offset_vectors(d)
    seen = {}
    for idx, o in enumerate(offs):
        key = tuple(int(v) for v in o % N)
        if all(v == 0 for v in key):
            problems.append(f"offset {tuple(map(int, o))} vanishes mod {N}")
        if key in seen:
            problems.append(
                f"offsets {tuple(map(int, offs[seen[key]]))} and {tuple(map(int, o))} collide mod {N}"
            )
        seen[key] = idx
    # Triangle lifting: a sum of two offsets congruent to a third (or to
    # zero) mod N must agree over Z, else the quotient graph has cliques
    # with no geometric counterpart.
    sums = offs[:, None, :] + offs[None, :, :]
    for k in range(len(offs)):
        defect = (sums - offs[k]) % N
        bad = np.all(defect == 0, axis=2) & np.any(sums != offs[k], axis=2)
        if np.any(bad):
            i0, j0 = np.argwhere(bad)[0]
            problems.append(
                f"cliques do not lift mod {N}: "
                f"{tuple(map(int, offs[i0]))} + {tuple(map(int, offs[j0]))}"
                f" = {tuple(map(int, offs[k]))} mod {N}"
            )
            break
    return problems


@dataclass(frozen=True)
class PermTorusSpec:
    """Side length N permutohedral torus in dimension d, homology dimension i."""

    d: int
    N: int
    i: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if not (1 <= self.i <= self.d - 1):
            raise ValueError("i must satisfy 1 <= i <= d-1")
        problems = validate_torus(self.d, self.N)
        if problems:
            raise ValueError("invalid permutohedral torus: " + "; ".join(problems))

    @property
    def n_sites(self) -> int:
        return self.N**self.d


@dataclass(frozen=True)
class SiteCoord:
    """Lattice coordinates of a permutohedron center, in basis-b components."""

    coords: tuple[int, ...]


def site_index(coords, N: int) -> int:
    idx = 0
    for c in coords:
        idx = idx * N + (int(c) % N)
    return idx


def site_coords(idx: int, d: int, N: int) -> tuple[int, ...]:
    out = []
    for _ in range(d):
        out.append(idx % N)
        idx //= N
    return tuple(reversed(out))


def neighbor_table(d: int, N: int) -> tuple[np.ndarray, np.ndarray]:
    """(site, slot) -> neighbor site index, plus the (slot, d) offsets."""
    offs = offset_vectors(d)
    n = N**d
    coords = np.array([site_coords(s, d, N) for s in range(n)], dtype=np.int64)
    table = np.empty((n, len(offs)), dtype=np.int64)
    for slot, o in enumerate(offs):
        moved = (coords + o) % N
        idx = np.zeros(n, dtype=np.int64)
        for j in range(d):
            idx = idx * N + moved[:, j]
        table[:, slot] = idx
    return table, offs


class CliqueComplex:
    """Clique complex of the site adjacency graph, up to a dimension cap.

    ``simplices_by_dim[k]`` is an (n_k, k+1) array of site indices with
    each row ascending; rows are in lexicographic (canonical) order.
    """

    def __init__(self, d, N, max_dim, vertex_ids, simplices_by_dim):
        self.d = d
        self.N = N
        self.max_dim = max_dim
        self.vertex_ids = np.asarray(vertex_ids, dtype=np.int64)
        self.simplices_by_dim = simplices_by_dim
        self._index_maps: dict[int, dict] = {}
        self._bnd_cache: dict[tuple[int, int], SparseFieldMatrix] = {}

    def n_cells(self, k: int) -> int:
        if k < 0 or k > self.max_dim:
            return 0
        if k == 0:
            return len(self.vertex_ids)
        return len(self.simplices_by_dim[k])

    def simplices(self, k: int) -> np.ndarray:
        if k == 0:
            return self.vertex_ids.reshape(-1, 1)
        if k < 0 or k > self.max_dim:
            return np.empty((0, max(k + 1, 0)), dtype=np.int64)
        return self.simplices_by_dim[k]

    def _index_map(self, k: int) -> dict:
        if k not in self._index_maps:
            self._index_maps[k] = {tuple(row): j for j, row in enumerate(self.simplices(k))}
        return self._index_maps[k]

    def boundary_matrix(self, k: int, f: PrimeField) -> SparseFieldMatrix:
        if not (1 <= k <= self.max_dim):
            raise ValueError(f"boundary defined for 1 <= k <= {self.max_dim}, got {k}")
        key = (k, f.q)
        if key not in self._bnd_cache:
            faces = self._index_map(k - 1)
            cols = []
            for row in self.simplices(k):
                entries = []
                for drop in range(k + 1):
                    face = tuple(np.delete(row, drop))
                    sign = 1 if drop % 2 == 0 else f.q - 1
                    entries.append((faces[face], sign))
                cols.append(sorted(entries))
            self._bnd_cache[key] = SparseFieldMatrix(self.n_cells(k - 1), cols, f.q)
        return self._bnd_cache[key]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.n_cells(k) for k in range(self.max_dim + 1))

    # -- homology-engine handle protocol ---------------------------------

    def filtration_matrices(self, i: int, f: PrimeField):
        d_i = self.boundary_matrix(i, f)
        if i + 1 <= self.max_dim:
            d_ip1 = self.boundary_matrix(i + 1, f)
        else:
            d_ip1 = SparseFieldMatrix(self.n_cells(i), [], f.q)
        return d_i, d_ip1

    def induced_columns(self, i: int, open_sites: np.ndarray):
        """Masks of i- and (i+1)-simplices fully supported on open sites."""
        sub_i = open_sites[self.simplices(i)].all(axis=1)
        sub_ip1 = None
        if i + 1 <= self.max_dim and self.n_cells(i + 1) > 0:
            sub_ip1 = open_sites[self.simplices(i + 1)].all(axis=1)
        return sub_i, sub_ip1

    def ambient_homology_rank(self, i: int) -> int:
        return comb(self.d, i)


def build_clique_complex(spec: PermTorusSpec, max_dim: int, budget: int = 10_000_000) -> CliqueComplex:
    """Clique complex of the full site graph, simplices up to max_dim."""
    if max_dim > spec.d + 1:
        max_dim = spec.d + 1  # no larger cliques exist; cap the work
    d, N = spec.d, spec.N
    table, _ = neighbor_table(d, N)
    n = spec.n_sites
    nbr_sets = [frozenset(int(t) for t in table[s]) for s in range(n)]

    simplices: list[np.ndarray] = [np.arange(n, dtype=np.int64).reshape(-1, 1)]
    total = n
    prev: list[tuple[int, ...]] = [(s,) for s in range(n)]
    for k in range(1, max_dim + 1):
        cur: list[tuple[int, ...]] = []
        for simp in prev:
            cands = nbr_sets[simp[0]]
            for v in simp[1:]:
                cands = cands & nbr_sets[v]
            last = simp[-1]
            for w in sorted(cands):
                if w > last:
                    cur.append(simp + (w,))
        total += len(cur)
        if total > budget:
            raise BudgetExceededError(
                f"{total} simplices through dimension {k} exceeds budget {budget}"
            )
        simplices.append(np.array(cur, dtype=np.int64).reshape(len(cur), k + 1))
        if not cur:
            max_dim = k  # nothing further can exist
            break
        prev = cur
    return CliqueComplex(d, N, len(simplices) - 1, np.arange(n, dtype=np.int64), simplices)


def induced_subcomplex(cx: CliqueComplex, open_sites) -> CliqueComplex:
    """Full subcomplex on the given sites, in the ambient canonical order."""
    mask = _as_mask(cx, open_sites)
    simplices = [cx.vertex_ids[mask[cx.vertex_ids]].reshape(-1, 1)]
    for k in range(1, cx.max_dim + 1):
        rows = cx.simplices(k)
        keep = mask[rows].all(axis=1) if len(rows) else np.zeros(0, dtype=bool)
        simplices.append(rows[keep])
    return CliqueComplex(cx.d, cx.N, cx.max_dim, simplices[0].ravel(), simplices)


def complement_sites(cx: CliqueComplex, open_sites) -> set[int]:
    mask = _as_mask(cx, open_sites)
    return set(int(v) for v in cx.vertex_ids[~mask[cx.vertex_ids]])


def _as_mask(cx: CliqueComplex, open_sites) -> np.ndarray:
    n = cx.N**cx.d
    if isinstance(open_sites, np.ndarray) and open_sites.dtype == bool:
        return open_sites
    mask = np.zeros(n, dtype=bool)
    for s in open_sites:
        mask[int(s)] = True
    return mask
