"""Random plaquette and site systems on tori, coupled sweeps, and audits.

A weight draw assigns an i.i.d. uniform weight to every random object;
the Bernoulli(p) samples for all p are then realized simultaneously as
the sublevel sets {weight <= p}.  Both giant-cycle events (A: the
induced map is nonzero, S: it is surjective) are increasing, so each
weight draw has well-defined critical values p_star_A <= p_star_S,
found either by binary search over the sorted weights (O(log m)
homology evaluations) or, for i = 1, by a single incremental
union-find scan.

Every audited sample is checked against the exact rank identity
rank(phi_*) + rank(psi_*) = C(d, i) relating a system and its dual;
a violation raises DualityAuditError since the identity is a theorem.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import numpy as np

from .cubical import CubicalComplexHandle, TorusSpec
from .fields import PrimeField
from .homology import (
    DisplacementForest,
    loop_class,
    FiltrationPair,
    InducedMapReport,
    ModularSpan,
    induced_map_rank,
    oracle_induced_map_rank,
)
from .permutohedral import (
    CliqueComplex,
    PermTorusSpec,
    build_clique_complex,
    neighbor_table,
)

CUBICAL = "cubical"
PERMUTOHEDRAL = "permutohedral"


class DualityAuditError(RuntimeError):
    """rank(phi_*) + rank(psi_*) differed from C(d, i) on some sample."""


def admissibility_violations(model: str, d: int, q: int) -> list[str]:
    """Field-characteristic constraints the theorems impose per model."""
    out = []
    if model == CUBICAL and q == 2:
        out.append("cubical model requires field characteristic != 2")
    if model == PERMUTOHEDRAL and (d + 1) % q == 0:
        out.append(f"permutohedral model requires characteristic not dividing d+1 = {d + 1}")
    return out


def require_admissible(model: str, d: int, q: int) -> None:
    problems = admissibility_violations(model, d, q)
    if problems:
        raise ValueError("; ".join(problems))


@dataclass
class PercSample:
    model: str
    open_mask: np.ndarray
    p: float | None = None

    @property
    def open_set(self) -> set[int]:
        return set(int(j) for j in np.flatnonzero(self.open_mask))


@dataclass
class WeightAssignment:
    """i.i.d. uniform weights, all distinct (and distinct after 1-w)."""

    weights: np.ndarray

    @classmethod
    def draw(cls, n: int, rng: np.random.Generator) -> "WeightAssignment":
        w = rng.random(n)
        while len(np.unique(w)) < n or len(np.unique(1.0 - w)) < n:
            w = rng.random(n)
        return cls(weights=w)


@dataclass
class ProbeResult:
    p: float
    rank_phi: int
    rank_psi: int
    event_A: bool
    event_S: bool


@dataclass
class TrialReport:
    trial: int
    stream_key: int
    p_star_A: float | None
    p_star_S: float | None
    probes: list[ProbeResult] = field(default_factory=list)
    ms: float = 0.0


# -- deterministic per-trial streams -----------------------------------------

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def mix_seed(master_seed: int, trial: int) -> int:
    """splitmix64 finalizer of (master_seed + trial * golden-gamma)."""
    z = (master_seed + trial * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(mix_seed(master_seed, trial))


# -- model contexts ----------------------------------------------------------


class CubicalModel:
    """Plaquette system context: i-faces of T^d_N are the random objects."""

    name = CUBICAL

    def __init__(self, d: int, N: int, i: int):
        self.spec = TorusSpec(d, N, i)
        self.d, self.N, self.i = d, N, i
        self.handle = _cubical_handle(d, N, i)
        self.n_top = self.spec.n_cells(i)
        self.D = comb(d, i)
        self._i1 = None

    def describe(self) -> tuple:
        return (self.name, self.d, self.N, self.i)

    def rank_report(self, open_mask: np.ndarray, f: PrimeField, method: str = "auto") -> InducedMapReport:
        if method == "auto":
            method = "uf" if self.i == 1 else "matrix"
        if method == "uf":
            if self.i != 1:
                raise ValueError("union-find path only applies to i = 1")
            r = self._i1_rank(open_mask, f.q)
            return InducedMapReport(rank_phi=r, betti_sub_i=None, ambient_rank=self.D)
        return induced_map_rank(FiltrationPair(self.handle, open_mask, self.i), f)

    def oracle_rank(self, open_mask: np.ndarray, f: PrimeField) -> int:
        return oracle_induced_map_rank(FiltrationPair(self.handle, open_mask, self.i), f)

    def dual_model(self) -> "CubicalModel":
        return make_model(CUBICAL, self.d, self.N, self.d - self.i)

    def dual_open_mask(self, open_mask: np.ndarray) -> np.ndarray:
        pair = self.handle.system_dual_map(self.i)
        dual = np.zeros(self.dual_model().n_top, dtype=bool)
        dual[pair[~open_mask]] = True
        return dual

    def dual_weights(self, weights: np.ndarray) -> np.ndarray:
        pair = self.handle.system_dual_map(self.i)
        out = np.empty_like(weights)
        out[pair] = 1.0 - weights
        return out

    # -- i = 1 union-find machinery --

    def _i1_graph(self):
        if self._i1 is None:
            if self.i != 1:
                raise ValueError("1-skeleton graph only defined for i = 1")
            d, N = self.d, self.N
            n_vertices = N**d
            coords = np.array(
                np.unravel_index(np.arange(n_vertices), (N,) * d)
            ).T  # row-major: matches anchor enumeration order
            m = self.n_top
            u = np.empty(m, dtype=np.int64)
            v = np.empty(m, dtype=np.int64)
            disp = np.zeros((m, d), dtype=np.int64)
            # canonical 1-cell order: direction blocks, anchors lex within
            for k in range(d):
                moved = coords.copy()
                moved[:, k] = (moved[:, k] + 1) % N
                idx = np.zeros(n_vertices, dtype=np.int64)
                for j in range(d):
                    idx = idx * N + moved[:, j]
                sl = slice(k * n_vertices, (k + 1) * n_vertices)
                u[sl] = np.arange(n_vertices)
                v[sl] = idx
                disp[sl, k] = 1
            self._i1 = (n_vertices, u, v, disp)
        return self._i1

    def _i1_rank(self, open_mask: np.ndarray, q: int) -> int:
        n_vertices, u, v, disp = self._i1_graph()
        forest = DisplacementForest(n_vertices, self.d)
        span = ModularSpan(q, self.d)
        for e in np.flatnonzero(open_mask):
            loop = forest.union(int(u[e]), int(v[e]), disp[e])
            if loop is not None:
                cls = loop_class(loop, self.N) % q
                if cls.any():
                    span.insert(cls)
                    if span.rank == self.D:
                        break
        return span.rank

    def i1_critical_pair(self, weights: np.ndarray, q: int) -> tuple[float, float]:
        """(p_star_A, p_star_S) from one incremental scan of the 1-skeleton."""
        n_vertices, u, v, disp = self._i1_graph()
        forest = DisplacementForest(n_vertices, self.d)
        span = ModularSpan(q, self.d)
        p_a, p_s = 1.0, 1.0
        got_a = False
        for e in np.argsort(weights, kind="stable"):
            loop = forest.union(int(u[e]), int(v[e]), disp[e])
            if loop is not None:
                cls = loop_class(loop, self.N) % q
                if cls.any() and span.insert(cls):
                    if not got_a:
                        p_a = float(weights[e])
                        got_a = True
                    if span.rank == self.D:
                        p_s = float(weights[e])
                        break
        return p_a, p_s


class PermutohedralModel:
    """Site system context: permutohedra (sites) are the random objects."""

    name = PERMUTOHEDRAL

    def __init__(self, d: int, N: int, i: int, budget: int = 10_000_000):
        self.spec = PermTorusSpec(d, N, i)
        self.d, self.N, self.i = d, N, i
        self.budget = budget
        self.complex: CliqueComplex = _clique_complex(d, N, i + 1, budget)
        self.n_top = self.spec.n_sites
        self.D = comb(d, i)

    def describe(self) -> tuple:
        return (self.name, self.d, self.N, self.i)

    def rank_report(self, open_mask: np.ndarray, f: PrimeField, method: str = "auto") -> InducedMapReport:
        if method == "auto":
            method = "uf" if self.i == 1 else "matrix"
        if method == "uf":
            if self.i != 1:
                raise ValueError("union-find path only applies to i = 1")
            r = self._i1_rank(open_mask, f.q)
            return InducedMapReport(rank_phi=r, betti_sub_i=None, ambient_rank=self.D)
        return induced_map_rank(FiltrationPair(self.complex, open_mask, self.i), f)

    def oracle_rank(self, open_mask: np.ndarray, f: PrimeField) -> int:
        return oracle_induced_map_rank(FiltrationPair(self.complex, open_mask, self.i), f)

    def dual_model(self) -> "PermutohedralModel":
        return make_model(PERMUTOHEDRAL, self.d, self.N, self.d - self.i, self.budget)

    def dual_open_mask(self, open_mask: np.ndarray) -> np.ndarray:
        return ~open_mask

    def dual_weights(self, weights: np.ndarray) -> np.ndarray:
        return 1.0 - weights

    def _neighbors(self):
        return _neighbor_table(self.d, self.N)

    def _i1_rank(self, open_mask: np.ndarray, q: int) -> int:
        if self.i != 1:
            raise ValueError("union-find path only applies to i = 1")
        table, offs = self._neighbors()
        forest = DisplacementForest(self.n_top, self.d)
        span = ModularSpan(q, self.d)
        for s in np.flatnonzero(open_mask):
            s = int(s)
            for slot in range(table.shape[1]):
                t = int(table[s, slot])
                if t < s and open_mask[t]:
                    loop = forest.union(s, t, offs[slot])
                    if loop is not None:
                        cls = loop_class(loop, self.N) % q
                        if cls.any():
                            span.insert(cls)
                            if span.rank == self.D:
                                return span.rank
        return span.rank

    def i1_critical_pair(self, weights: np.ndarray, q: int) -> tuple[float, float]:
        if self.i != 1:
            raise ValueError("union-find path only applies to i = 1")
        table, offs = self._neighbors()
        forest = DisplacementForest(self.n_top, self.d)
        span = ModularSpan(q, self.d)
        open_mask = np.zeros(self.n_top, dtype=bool)
        p_a, p_s = 1.0, 1.0
        got_a = False
        for s in np.argsort(weights, kind="stable"):
            s = int(s)
            open_mask[s] = True
            for slot in range(table.shape[1]):
                t = int(table[s, slot])
                if open_mask[t] and t != s:
                    loop = forest.union(s, t, offs[slot])
                    if loop is not None:
                        cls = loop_class(loop, self.N) % q
                        if cls.any() and span.insert(cls):
                            if not got_a:
                                p_a = float(weights[s])
                                got_a = True
                            if span.rank == self.D:
                                return p_a, float(weights[s])
        return p_a, p_s


@lru_cache(maxsize=None)
def _cubical_handle(d: int, N: int, i: int) -> CubicalComplexHandle:
    return CubicalComplexHandle(TorusSpec(d, N, i))


@lru_cache(maxsize=None)
def _clique_complex(d: int, N: int, max_dim: int, budget: int) -> CliqueComplex:
    return build_clique_complex(PermTorusSpec(d, N, 1 if max_dim <= 2 else max_dim - 1), max_dim, budget)


@lru_cache(maxsize=None)
def _neighbor_table(d: int, N: int):
    return neighbor_table(d, N)


@lru_cache(maxsize=None)
def make_model(name: str, d: int, N: int, i: int, budget: int = 10_000_000):
    if name == CUBICAL:
        return CubicalModel(d, N, i)
    if name == PERMUTOHEDRAL:
        return PermutohedralModel(d, N, i, budget)
    raise ValueError(f"unknown model {name!r}")


# -- sampling and audits ------------------------------------------------------


def sample_at(model, p: float, rng: np.random.Generator) -> PercSample:
    """Bernoulli(p) sample: each face/site open independently."""
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    return PercSample(model.name, rng.random(model.n_top) < p, p)


def sample_from_weights(model, weights: np.ndarray, p: float) -> PercSample:
    """Coupled sample at level p: the sublevel set {weight <= p}."""
    return PercSample(model.name, weights <= p, p)


def dual_sample(s: PercSample, model) -> PercSample:
    """The dual system: partner cell open iff the primal cell is closed."""
    p = None if s.p is None else 1.0 - s.p
    return PercSample(model.name, model.dual_open_mask(s.open_mask), p)


def duality_audit(s: PercSample, model, f: PrimeField, method: str = "auto") -> tuple[int, int]:
    """rank(phi_*) on s plus rank(psi_*) on its dual; must sum to C(d, i)."""
    require_admissible(model.name, model.d, f.q)
    rank_phi = model.rank_report(s.open_mask, f, method).rank_phi
    dual = dual_sample(s, model)
    rank_psi = model.dual_model().rank_report(dual.open_mask, f, method).rank_phi
    if rank_phi + rank_psi != model.D:
        raise DualityAuditError(
            f"duality violated: rank_phi={rank_phi} + rank_psi={rank_psi} != {model.D} "
            f"on {model.describe()} with p={s.p}"
        )
    return rank_phi, rank_psi


# -- critical probabilities ---------------------------------------------------


def critical_pair(
    weights: np.ndarray, model, f: PrimeField, method: str = "auto"
) -> tuple[float, float]:
    """(p_star_A, p_star_S) for one weight assignment.

    For i = 1 a single union-find sweep produces both values; otherwise
    each is located by binary search over the sorted weights, which is
    valid because both events are increasing along the coupling.
    """
    if method == "auto":
        method = "uf" if model.i == 1 else "matrix"
    if method == "uf":
        return model.i1_critical_pair(weights, f.q)

    order = np.argsort(weights, kind="stable")
    sorted_w = weights[order]
    m = len(weights)
    cache: dict[int, int] = {}

    def rank_at(k: int) -> int:
        if k not in cache:
            mask = np.zeros(m, dtype=bool)
            mask[order[:k]] = True
            cache[k] = model.rank_report(mask, f, "matrix").rank_phi
        return cache[k]

    def first_true(pred, lo: int, hi: int) -> int:
        # pred is monotone; pred(lo) False (or lo == -1), pred(hi) True
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pred(mid):
                hi = mid
            else:
                lo = mid
        return hi

    if rank_at(m) < 1:
        return 1.0, 1.0  # cannot happen on a full torus; guard anyway
    k_a = first_true(lambda k: rank_at(k) >= 1, 0, m)
    if rank_at(m) < model.D:
        return float(sorted_w[k_a - 1]), 1.0
    k_s = first_true(lambda k: rank_at(k) >= model.D, k_a - 1 if k_a > 0 else 0, m)
    p_a = float(sorted_w[k_a - 1]) if k_a > 0 else 0.0
    p_s = float(sorted_w[k_s - 1]) if k_s > 0 else 0.0
    return p_a, p_s


def critical_probability(
    weights: np.ndarray, model, event: str, f: PrimeField, method: str = "auto"
) -> float:
    """Smallest weight u with the event holding on {weight <= u}."""
    p_a, p_s = critical_pair(weights, model, f, method)
    if event == "A":
        return p_a
    if event == "S":
        return p_s
    raise ValueError(f"event must be 'A' or 'S', got {event!r}")


# -- trial driver -------------------------------------------------------------


def run_single_trial(
    model,
    f: PrimeField,
    master_seed: int,
    trial: int,
    probe_ps: tuple[float, ...] = (),
    compute_pstar: bool = True,
    method: str = "auto",
) -> TrialReport:
    t0 = time.perf_counter()
    key = mix_seed(master_seed, trial)
    rng = np.random.default_rng(key)
    w = WeightAssignment.draw(model.n_top, rng).weights
    p_a = p_s = None
    if compute_pstar:
        p_a, p_s = critical_pair(w, model, f, method)
    probes = []
    for p in probe_ps:
        s = sample_from_weights(model, w, p)
        rank_phi, rank_psi = duality_audit(s, model, f, method)
        probes.append(
            ProbeResult(
                p=p,
                rank_phi=rank_phi,
                rank_psi=rank_psi,
                event_A=rank_phi >= 1,
                event_S=rank_phi == model.D,
            )
        )
    ms = (time.perf_counter() - t0) * 1000.0
    return TrialReport(trial=trial, stream_key=key, p_star_A=p_a, p_star_S=p_s, probes=probes, ms=ms)


def _trial_task(args) -> TrialReport:
    name, d, N, i, q, master_seed, trial, probe_ps, compute_pstar, method = args
    model = make_model(name, d, N, i)
    return run_single_trial(model, PrimeField(q), master_seed, trial, probe_ps, compute_pstar, method)


def run_trials(
    model,
    f: PrimeField,
    trials: int,
    seed: int,
    probe_ps: tuple[float, ...] = (),
    compute_pstar: bool = True,
    method: str = "auto",
    workers: int = 1,
) -> list[TrialReport]:
    """Independent trials, reproducible from (seed, trial index).

    Trial t draws its weights from a generator keyed by a 64-bit mix of
    (seed, t), so results do not depend on scheduling or worker count.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    require_admissible(model.name, model.d, f.q)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [
            model.describe() + (f.q, seed, t, tuple(probe_ps), compute_pstar, method)
            for t in range(trials)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_trial_task, tasks))
    else:
        reports = [
            run_single_trial(model, f, seed, t, tuple(probe_ps), compute_pstar, method)
            for t in range(trials)
        ]
    reports.sort(key=lambda r: r.trial)
    return reports


def summarize(reports: list[TrialReport]) -> dict:
    """Medians, quantiles and event frequencies across trials."""
    out: dict = {"trials": len(reports)}
    p_as = [r.p_star_A for r in reports if r.p_star_A is not None]
    p_ss = [r.p_star_S for r in reports if r.p_star_S is not None]
    qs = [0.05, 0.25, 0.5, 0.75, 0.95]
    if p_as:
        out["median_p_star_A"] = float(np.median(p_as))
        out["quantiles_p_star_A"] = {str(q): float(np.quantile(p_as, q)) for q in qs}
    if p_ss:
        out["median_p_star_S"] = float(np.median(p_ss))
        out["quantiles_p_star_S"] = {str(q): float(np.quantile(p_ss, q)) for q in qs}
    by_p: dict[float, list[ProbeResult]] = {}
    for r in reports:
        for pr in r.probes:
            by_p.setdefault(pr.p, []).append(pr)
    if by_p:
        out["event_frequencies"] = {
            str(p): {
                "A": float(np.mean([pr.event_A for pr in v])),
                "S": float(np.mean([pr.event_S for pr in v])),
                "mean_rank_phi": float(np.mean([pr.rank_phi for pr in v])),
            }
            for p, v in sorted(by_p.items())
        }
    return out
