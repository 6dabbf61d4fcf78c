"""Homological percolation on cubical and permutohedral tori.

Exact GF(q) homology of random plaquette and site systems, the duality
identity rank(phi_*) + rank(psi_*) = C(d, i) audited per sample, and
Monte Carlo estimation of giant-cycle thresholds.
"""

from .cubical import (
    CubicalCell,
    CubicalComplexHandle,
    SignedChain,
    TorusSpec,
    boundary,
    boundary_matrix,
    cell_index,
    dual_cell,
    dual_index_map,
    enumerate_cells,
)
from .fields import (
    PrimeField,
    ReductionOutcome,
    SparseFieldMatrix,
    filtration_reduce,
    kernel_basis,
    rank,
)
from .homology import (
    FiltrationPair,
    InducedMapReport,
    betti,
    induced_map_rank,
    oracle_induced_map_rank,
)
from .percolation import (
    CubicalModel,
    DualityAuditError,
    PercSample,
    PermutohedralModel,
    TrialReport,
    WeightAssignment,
    critical_pair,
    critical_probability,
    dual_sample,
    duality_audit,
    make_model,
    run_trials,
    sample_at,
    summarize,
)
from .permutohedral import (
    AdjacencyOffset,
    CliqueComplex,
    PermTorusSpec,
    adjacency_offsets,
    build_clique_complex,
    complement_sites,
    induced_subcomplex,
)

__version__ = "0.1.0"
