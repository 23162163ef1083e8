"""Electrode graphs: topology, shift operators, montages and WL refinement."""
from .graph import (
    Graph,
    ShiftOperatorKind,
    parse_shift_operator_kind,
    adjacency,
    degree_matrix,
    laplacian,
    normalized_adjacency,
    normalized_laplacian,
    shift_operator,
    save_edge_list,
    load_edge_list,
)
from .montage import (
    Montage,
    EdgePolicy,
    parse_edge_policy,
    pairwise_distances,
    build_graph,
    load_montage,
    save_montage,
)
from .wl import WlColoring, wl_refine, wl_equivalent

__all__ = [
    "Graph",
    "ShiftOperatorKind",
    "parse_shift_operator_kind",
    "adjacency",
    "degree_matrix",
    "laplacian",
    "normalized_adjacency",
    "normalized_laplacian",
    "shift_operator",
    "save_edge_list",
    "load_edge_list",
    "Montage",
    "EdgePolicy",
    "parse_edge_policy",
    "pairwise_distances",
    "build_graph",
    "load_montage",
    "save_montage",
    "WlColoring",
    "wl_refine",
    "wl_equivalent",
]
