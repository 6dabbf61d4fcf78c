"""Acceptance criteria, one test per criterion, at the stated tolerances.

Run with -s to see the per-criterion PASS lines.  The suite is sized for
desk-scale hardware: the heaviest criteria (exact duality sweep and the
d=4 self-dual point) take a few minutes together.
"""

import csv
from math import comb

import numpy as np
import pytest

from homoperc.cubical import (
    CubicalComplexHandle,
    TorusSpec,
    boundary_matrix,
    dual_cell,
    dual_index_map,
    enumerate_cells,
    is_face,
)
from homoperc.fields import PrimeField
from homoperc.homology import FiltrationPair, betti, induced_map_rank, oracle_induced_map_rank
from homoperc.percolation import (
    WeightAssignment,
    critical_pair,
    duality_audit,
    make_model,
    sample_at,
    trial_rng,
)
from homoperc.permutohedral import PermTorusSpec, build_clique_complex, neighbor_table

F3 = PrimeField(3)
F5 = PrimeField(5)


def report(criterion: str, ok: bool, detail: str):
    print(f"\n[{criterion}] {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"{criterion}: {detail}"


def admissible_field(model_name: str, d: int) -> PrimeField:
    if model_name == "permutohedral" and d == 2:
        return PrimeField(2)
    return F3


class TestCriterion1ExactDuality:
    CONFIGS = [
        ("cubical", 2, 6, 1),
        ("cubical", 3, 4, 1),
        ("cubical", 3, 4, 2),
        ("cubical", 4, 3, 2),
        ("permutohedral", 2, 5, 1),
        ("permutohedral", 3, 4, 1),
        ("permutohedral", 3, 4, 2),
    ]

    @pytest.mark.parametrize("name,d,N,i", CONFIGS)
    def test_duality_500_samples(self, name, d, N, i):
        model = make_model(name, d, N, i)
        f = admissible_field(name, d)
        rng = trial_rng(1000 + 7 * d + i, N)
        checked = 0
        for p in (0.25, 0.5, 0.75):
            for _ in range(500):
                rank_phi, rank_psi = duality_audit(sample_at(model, p, rng), model, f)
                assert rank_phi + rank_psi == comb(d, i)
                checked += 1
        report(
            "criterion 1",
            checked == 1500,
            f"{name} d={d} i={i} N={N} q={f.q}: rank_phi+rank_psi=C(d,i) "
            f"on {checked} samples (p in 0.25/0.5/0.75), zero failures",
        )


class TestCriterion2OracleEquivalence:
    CUBICAL = [(2, 3, 1), (2, 4, 1), (3, 3, 1), (3, 3, 2), (3, 4, 1), (3, 4, 2)]

    @pytest.mark.parametrize("d,N,i", CUBICAL)
    def test_cubical(self, d, N, i):
        handle = CubicalComplexHandle(TorusSpec(d, N, i))
        n = handle.n_cells(i)
        rng = trial_rng(2000 + d, N * 10 + i)
        for _ in range(100):
            mask = rng.random(n) < rng.uniform(0.2, 0.8)
            fp = FiltrationPair(handle, mask, i)
            assert induced_map_rank(fp, F3).rank_phi == oracle_induced_map_rank(fp, F3)
        report("criterion 2", True,
               f"cubical d={d} N={N} i={i}: fast path == oracle on 100 random samples")

    def test_permutohedral(self):
        f2 = PrimeField(2)
        cx = build_clique_complex(PermTorusSpec(2, 4, 1), 2)
        rng = trial_rng(2100, 0)
        for _ in range(100):
            mask = rng.random(16) < rng.uniform(0.2, 0.8)
            fp = FiltrationPair(cx, mask, 1)
            assert induced_map_rank(fp, f2).rank_phi == oracle_induced_map_rank(fp, f2)
        report("criterion 2", True,
               "permutohedral d=2 N=4 i=1 GF(2): fast path == oracle on 100 random samples")


class TestCriterion3BettiValidation:
    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("f", [F3, F5], ids=["GF3", "GF5"])
    def test_cubical(self, d, f):
        handle = CubicalComplexHandle(TorusSpec(d, 3, 1))
        got = [betti(handle, k, f) for k in range(d + 1)]
        want = [comb(d, k) for k in range(d + 1)]
        report("criterion 3", got == want, f"cubical d={d} N=3 GF({f.q}): betti {got}")

    @pytest.mark.parametrize("d,N,q", [(2, 4, 2), (2, 5, 2), (3, 4, 3)])
    def test_permutohedral(self, d, N, q):
        # N=3 is refused at construction (quotient cliques do not lift),
        # so the validated range starts at N=4.
        cx = build_clique_complex(PermTorusSpec(d, N, 1), d + 1)
        f = PrimeField(q)
        got = [betti(cx, k, f) for k in range(d + 1)]
        want = [comb(d, k) for k in range(d + 1)]
        report("criterion 3", got == want, f"permutohedral d={d} N={N} GF({q}): betti {got}")


class TestCriterion4SelfDualThreshold:
    def test_4a_d2_median(self):
        model = make_model("cubical", 2, 32, 1)
        medians = []
        stars = [
            critical_pair(WeightAssignment.draw(model.n_top, trial_rng(4001, t)).weights,
                          model, F3, method="uf")[0]
            for t in range(300)
        ]
        med = float(np.median(stars))
        report("criterion 4a", 0.45 <= med <= 0.55,
               f"cubical d=2 i=1 N=32, 300 trials: median p*_A = {med:.4f} in [0.45, 0.55]")

    def test_4b_d4_point_probability(self):
        model = make_model("cubical", 4, 4, 2)
        rng = trial_rng(4002, 0)
        hits = 0
        n = 200
        for _ in range(n):
            s = sample_at(model, 0.5, rng)
            hits += model.rank_report(s.open_mask, F3).rank_phi >= 1
        freq = hits / n
        report("criterion 4b", freq >= 0.45,
               f"cubical d=4 i=2 N=4, {n} trials: P_0.5(A) = {freq:.3f} >= 0.45")


class TestCriterion5BondThreshold:
    def test_d3_bond(self):
        model = make_model("cubical", 3, 16, 1)
        stars = [
            critical_pair(WeightAssignment.draw(model.n_top, trial_rng(5001, t)).weights,
                          model, F3, method="uf")[0]
            for t in range(200)
        ]
        med = float(np.median(stars))
        # 0.2488: numerical bond percolation threshold for Z^3 (external value)
        report("criterion 5", abs(med - 0.2488) <= 0.04,
               f"cubical d=3 i=1 N=16, 200 trials: median p*_A = {med:.4f}, |. - 0.2488| <= 0.04")


class TestCriterion6TriangularSite:
    def test_d2_site(self):
        model = make_model("permutohedral", 2, 32, 1)
        f2 = PrimeField(2)
        stars = [
            critical_pair(WeightAssignment.draw(model.n_top, trial_rng(6001, t)).weights,
                          model, f2, method="uf")[0]
            for t in range(300)
        ]
        med = float(np.median(stars))
        report("criterion 6", 0.45 <= med <= 0.55,
               f"permutohedral d=2 i=1 N=32, 300 trials: median p*_A = {med:.4f} in [0.45, 0.55]")


class TestCriterion7PerSampleCriticalDuality:
    def test_exact_coupled_identity(self):
        model = make_model("cubical", 2, 16, 1)
        dual = model.dual_model()
        mismatches = 0
        for t in range(500):
            w = WeightAssignment.draw(model.n_top, trial_rng(7001, t)).weights
            p_a, _ = critical_pair(w, model, F3)
            _, dual_p_s = critical_pair(model.dual_weights(w), dual, F3)
            if dual_p_s != np.float64(1.0) - np.float64(p_a):
                mismatches += 1
        report("criterion 7", mismatches == 0,
               "cubical d=2 i=1 N=16, 500 coupled draws: "
               f"p*_S(dual, 1-w) == 1 - p*_A per draw, {mismatches} mismatches")


class TestCriterion8Monotonicity:
    @staticmethod
    def median_and_se(values):
        v = np.asarray(values, dtype=float)
        return float(np.median(v)), 1.2533 * float(np.std(v, ddof=1)) / np.sqrt(len(v))

    def test_decreasing_in_d_at_i1(self):
        meds = {}
        for d, N in [(3, 16), (2, 16)]:
            model = make_model("cubical", d, N, 1)
            stars = [
                critical_pair(WeightAssignment.draw(model.n_top, trial_rng(8000 + d, t)).weights,
                              model, F3, method="uf")[0]
                for t in range(200)
            ]
            meds[d] = self.median_and_se(stars)
        gap = meds[2][0] - meds[3][0]
        pooled = np.hypot(meds[3][1], meds[2][1])
        report("criterion 8", gap > 3 * pooled,
               f"median p*_A(i=1,d=3)={meds[3][0]:.4f} < median p*_A(i=1,d=2)={meds[2][0]:.4f}, "
               f"gap {gap:.4f} > 3*SE {3 * pooled:.4f} (N=16, 200 trials)")

    def test_increasing_in_i_at_d3(self):
        model1 = make_model("cubical", 3, 8, 1)
        stars1 = [
            critical_pair(WeightAssignment.draw(model1.n_top, trial_rng(8100, t)).weights,
                          model1, F3, method="uf")[0]
            for t in range(200)
        ]
        model2 = make_model("cubical", 3, 8, 2)
        stars2 = [
            critical_pair(WeightAssignment.draw(model2.n_top, trial_rng(8200, t)).weights,
                          model2, F3, method="matrix")[0]
            for t in range(200)
        ]
        m1, se1 = self.median_and_se(stars1)
        m2, se2 = self.median_and_se(stars2)
        gap = m2 - m1
        pooled = np.hypot(se1, se2)
        report("criterion 8", gap > 3 * pooled,
               f"median p*_A(i=1,d=3)={m1:.4f} < median p*_A(i=2,d=3)={m2:.4f}, "
               f"gap {gap:.4f} > 3*SE {3 * pooled:.4f} (N=8, 200 trials)")


class TestCriterion9StructuralSuites:
    def test_boundary_squared_zero(self):
        ok = True
        for q in (3, 5):
            f = PrimeField(q)
            spec = TorusSpec(3, 3, 1)
            for k in (2, 3):
                dk = boundary_matrix(spec, k, f).to_dense()
                dk1 = boundary_matrix(spec, k - 1, f).to_dense()
                ok &= not ((dk1 @ dk) % q).any()
        report("criterion 9", ok, "dd = 0 for all k on T^3_3 over GF(3) and GF(5)")

    def test_dual_bijection_and_incidence_reversal(self):
        spec = TorusSpec(3, 3, 1)
        ok = True
        for k in range(4):
            m = dual_index_map(spec, k)
            ok &= len(set(m.tolist())) == comb(3, k) * 27
        cells = [c for k in range(4) for c in enumerate_cells(spec, k)]
        for tau in cells:
            for sigma in cells:
                if sigma.dim >= tau.dim:
                    continue
                if is_face(sigma, tau, spec) != is_face(
                    dual_cell(tau, spec), dual_cell(sigma, spec), spec
                ):
                    ok = False
        report("criterion 9", ok, "dual bijection k->(d-k) and incidence reversal, d=3 N=3 exhaustive")

    def test_clique_degree(self):
        ok = True
        for d, N in [(2, 4), (2, 5), (3, 4)]:
            cx = build_clique_complex(PermTorusSpec(d, N, 1), 1)
            deg = np.zeros(N**d, dtype=int)
            for a, b in cx.simplices(1):
                deg[a] += 1
                deg[b] += 1
            ok &= (deg == 2 ** (d + 1) - 2).all()
        report("criterion 9", ok, "clique-complex degree = 2^(d+1)-2 on all validated tori")

    def test_increasing_event_monotonicity(self):
        rng = np.random.default_rng(900)
        handle = CubicalComplexHandle(TorusSpec(2, 4, 1))
        n = handle.n_cells(1)
        done = 0
        ok = True
        while done < 200:
            mask = rng.random(n) < rng.random()
            closed = np.flatnonzero(~mask)
            if len(closed) == 0:
                continue
            base = induced_map_rank(FiltrationPair(handle, mask, 1), F3).rank_phi
            grown = mask.copy()
            grown[rng.choice(closed)] = True
            ok &= induced_map_rank(FiltrationPair(handle, grown, 1), F3).rank_phi >= base
            done += 1
        report("criterion 9", ok, "rank_phi monotone under adding one face, 200 trials")

    def test_seed_to_bytes_determinism(self, tmp_path):
        from homoperc.cli import EXIT_OK, main

        args = ["threshold", "--model", "cubical", "-d", "2", "-i", "1", "-N", "16",
                "-q", "3", "--trials", "25", "--seed", "2024", "--no-timing",
                "-o", str(tmp_path / "det")]
        assert main(args) == EXIT_OK
        first = (tmp_path / "det.csv").read_bytes(), (tmp_path / "det.json").read_bytes()
        assert main(args) == EXIT_OK
        second = (tmp_path / "det.csv").read_bytes(), (tmp_path / "det.json").read_bytes()
        report("criterion 9", first == second,
               "identical (config, seed) reproduces identical output bytes")
