"""Geometry and homology of the permutohedral torus.

Sites of the A_d* lattice tile the torus by permutohedra (hexagons for
d=2, truncated octahedra for d=3).  Every site has 2^(d+1)-2 facet
neighbors, the nerve of the tiling is the clique complex of the
adjacency graph, and the full complex carries the torus homology:
betti_k = C(d, k).
"""

from math import comb

import numpy as np

from homoperc import PrimeField, adjacency_offsets, betti, build_clique_complex
from homoperc.permutohedral import PermTorusSpec, validate_torus

for d in (2, 3):
    offs = adjacency_offsets(d)
    print(f"d={d}: {len(offs)} facet offsets = 2^{d + 1}-2")
    for o in offs[:4]:
        print(f"   A={sorted(o.subset_a)}  w_A={o.ambient}  basis coords={o.offset}")
    print("   ...")

print("\nquotient soundness: the nerve is the clique complex only when "
      "every clique of the quotient graph lifts to Z^d")
for N in (3, 4, 5):
    problems = validate_torus(2, N)
    print(f"  d=2 N={N}: {'ok' if not problems else problems[0]}")

print()
for d, N, q in [(2, 4, 2), (2, 5, 2), (3, 4, 3)]:
    cx = build_clique_complex(PermTorusSpec(d, N, 1), d + 1)
    f = PrimeField(q)
    counts = [cx.n_cells(k) for k in range(d + 1)]
    bettis = [betti(cx, k, f) for k in range(d + 1)]
    assert bettis == [comb(d, k) for k in range(d + 1)]
    print(f"d={d} N={N}: cells {counts}, chi={cx.euler_characteristic()}, "
          f"betti over GF({q}) = {bettis}")
