"""Graph isomorphism through tree-structured decompositions and
bag-restricted Weisfeiler-Lehman refinement."""

from .blocks import (
    BlockForest,
    OracleInstance,
    ReductionTrace,
    blocks_relative,
    gadget_encode,
    iso_via_blocks,
    stw_to_degree_iso,
)
from .connectivity import disjoint_paths_to_set, kcon_closure, kcon_pairs, max_disjoint_paths
from .decomposition import (
    StrongTreeDecomposition,
    TreeDecomposition,
    TreeDistanceDecomposition,
    minimal_tdd,
    tdw_of_root,
)
from .errors import BagwlError, Verdict
from .families import (
    brute_cstw,
    brute_ctdw,
    brute_rtdw,
    brute_stw,
    complete,
    cycle,
    kp_comb,
    kp_path,
    path,
    random_graph,
)
from .formats import parse_bag_family, parse_graph, serialize_bag_family, serialize_graph
from .graphs import EquivalencePartition, Graph, TupleColoring, build_graph, relabel
from .root_enum import ctdw_iso, enumerate_root_sets, saturate_root
from .solvers import (
    brute_force_iso,
    brute_force_iso_colored,
    capture_bags_connected_quotient,
    capture_bags_geodesic,
    chordality,
    cstw_iso,
    geodesic_cycle_length,
    geodesic_stw_iso,
    iso_with_supplied_bags,
)
from .wl import BagFamily, bag_family, compare_graphs, compare_with_strong_capture

__version__ = "0.1.0"

__all__ = [
    "BagFamily",
    "BagwlError",
    "BlockForest",
    "EquivalencePartition",
    "Graph",
    "OracleInstance",
    "ReductionTrace",
    "StrongTreeDecomposition",
    "TreeDecomposition",
    "TreeDistanceDecomposition",
    "TupleColoring",
    "Verdict",
    "bag_family",
    "blocks_relative",
    "brute_cstw",
    "brute_ctdw",
    "brute_force_iso",
    "brute_force_iso_colored",
    "brute_rtdw",
    "brute_stw",
    "build_graph",
    "capture_bags_connected_quotient",
    "capture_bags_geodesic",
    "chordality",
    "compare_graphs",
    "compare_with_strong_capture",
    "complete",
    "cstw_iso",
    "ctdw_iso",
    "cycle",
    "disjoint_paths_to_set",
    "enumerate_root_sets",
    "gadget_encode",
    "geodesic_cycle_length",
    "geodesic_stw_iso",
    "iso_via_blocks",
    "iso_with_supplied_bags",
    "kcon_closure",
    "kcon_pairs",
    "kp_comb",
    "kp_path",
    "max_disjoint_paths",
    "minimal_tdd",
    "parse_bag_family",
    "parse_graph",
    "path",
    "random_graph",
    "relabel",
    "saturate_root",
    "serialize_bag_family",
    "serialize_graph",
    "stw_to_degree_iso",
    "tdw_of_root",
    "__version__",
]
