"""Matrix-free spectral analysis of large directed networks.

Builds the column-stochastic link operator of a directed graph, splits
the nodes into invariant subspaces and a core space, computes leading
complex eigenvalues and eigenvectors by the Arnoldi method, and derives
PageRank/CheiRank together with their correlation, localization, decay
and link-distribution statistics.
"""

from .analysis import (
    CutCounts,
    DensityGrid,
    correlator,
    cut_counts,
    decay_exponent,
    density_grid,
    eigenvalue_phase,
    ipr,
    rank_order,
    select_near_circle,
    top_nodes,
    word_frequency,
)
from .arnoldi import (
    EigenPair,
    KrylovBasis,
    arnoldi_iterate,
    core_spectrum,
    hessenberg_eigen,
    ritz_vectors,
)
from .graphs import (
    DirectedGraph,
    GraphStats,
    LabelTable,
    attach_labels,
    graph_stats,
    load_cache,
    load_edge_list,
    load_labels,
    remap_dense,
    save_cache,
    write_edge_list,
)
from .operators import CoreOperator, StochasticOperator, apply_core, build_stochastic
from .ranking import (
    FitResult,
    RankVector,
    SubspaceRank,
    cheirank,
    pagerank,
    pagerank_near_one,
    zipf_fit,
)
from .subspaces import (
    SpectrumSummary,
    SubspaceDecomposition,
    SubspaceSpectrum,
    count_unit_eigenvalues,
    detect_subspaces,
    subspace_spectrum,
    summarize_spectra,
)

__version__ = "0.1.0"
