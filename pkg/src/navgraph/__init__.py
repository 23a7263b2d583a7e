"""Sparse navigable search graphs for arbitrary point sets and distance functions.

The package builds directed graphs in which greedy search from any start node
reaches any target node in the dataset, keeping the number of edges within a
logarithmic factor of the sparsest such graph.  It also covers the two common
strengthenings used by graph-based nearest neighbor indexes (multiplicative
"shortcut" improvement and additive monotone improvement), a family of
randomized set-cover solvers with query access, exact verifiers and oracles,
and generators for adversarial benchmark instances.
"""

from navgraph.dataset import (
    DistanceOracle,
    FormatError,
    PointSet,
    SearchGraph,
    load_graph,
    load_matrix,
    load_points,
    save_graph,
    save_matrix,
    save_points,
)
from navgraph.perm_index import PermutationIndex, PrefixTable, build_index, build_prefix_table
from navgraph.setcover import (
    CoverSolution,
    SetSystem,
    UncoverableError,
    construct_limited_vote_cover,
    construct_vote_cover,
    cvc_stop_early,
    greedy_set_cover,
)
from navgraph.navbuild import (
    BuildReport,
    NGCoverParams,
    build_alpha,
    build_classic_greedy,
    build_clique_baseline,
    build_full,
    build_simple,
    build_tau,
    ng_cover,
)
from navgraph.verify import (
    Violation,
    check_cover,
    exact_min_neighborhood,
    greedy_route,
    verify_alpha,
    verify_navigable,
    verify_tau,
)

__version__ = "0.1.0"
