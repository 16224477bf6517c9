"""Bipartite correlation clustering: PivotBiCluster, exact optima, lower bounds
and the tuple-dual analysis checked by Monte Carlo."""
from .baselines import run_ghkz
from .bounds import (
    check_dual_feasibility,
    check_lemma3,
    dual_solution,
    enumerate_bad_squares,
    estimate_tuple_stats,
    packing_bound,
    q_symmetry,
    square_lp_bound,
)
from .clustering import Clustering, CostReport, cost, erroneous_pairs, format_clustering, normalize
from .exact import enumerate_partitions, opt
from .graph import (
    BipartiteGraph,
    gen_biclique_union,
    gen_counterexample,
    gen_planted,
    gen_random,
    neighbors,
    new_graph,
    parse_graph,
    serialize_graph,
)
from .pivot import PivotRunner, TupleKey, conjugate, decide_ell2, run, verify_trace
from .rng import SplitMix64, derive_seed

__version__ = "0.1.0"
