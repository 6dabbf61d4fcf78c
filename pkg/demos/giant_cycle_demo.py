"""What a giant cycle is, on the smallest interesting example.

On the 3x3 torus, opening the three horizontal bonds of one row creates
a loop that wraps the torus: its class generates one of the two
H_1 factors, so the inclusion-induced map has rank 1 (event A but not
S).  Opening a wrapping column too makes the map surjective (event S).
"""

import numpy as np

from homoperc import PrimeField, TorusSpec, cell_index
from homoperc.cubical import CubicalCell
from homoperc.percolation import make_model

f = PrimeField(3)
spec = TorusSpec(2, 3, 1)
model = make_model("cubical", 2, 3, 1)

mask = np.zeros(model.n_top, dtype=bool)
for x in range(3):
    mask[cell_index(spec, CubicalCell((x, 0), (1,)))] = True
rep = model.rank_report(mask, f, method="matrix")
print(f"one wrapping row:    rank(phi_*) = {rep.rank_phi}  "
      f"A={rep.event_A} S={rep.event_S} Z={rep.event_Z}")

for y in range(3):
    mask[cell_index(spec, CubicalCell((0, y), (2,)))] = True
rep = model.rank_report(mask, f, method="matrix")
print(f"row + wrapping column: rank(phi_*) = {rep.rank_phi}  "
      f"A={rep.event_A} S={rep.event_S} Z={rep.event_Z}")

# a contractible square contributes nothing
mask = np.zeros(model.n_top, dtype=bool)
for cell in [CubicalCell((0, 0), (1,)), CubicalCell((0, 1), (1,)),
             CubicalCell((0, 0), (2,)), CubicalCell((1, 0), (2,))]:
    mask[cell_index(spec, cell)] = True
rep = model.rank_report(mask, f, method="matrix")
print(f"contractible square: rank(phi_*) = {rep.rank_phi}  "
      f"A={rep.event_A} S={rep.event_S} Z={rep.event_Z} "
      f"(betti_1 of the subcomplex = {rep.betti_sub_i})")
