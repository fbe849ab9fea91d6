"""Graph data model, graph6/digraph6 serialization, canonical labels, enumeration."""

from .canon import (
    CanonicalForm,
    canonical_graph,
    canonical_label,
    canonical_permutation,
    converse_free_label,
    is_isomorphic,
)
from .enumerate import (
    enumerate_orientations,
    enumerate_simple_graphs,
    extend_level,
    graph_levels,
    gray_code,
    orientation_from_mask,
)
from .formats import emit_digraph6, emit_graph6, parse_digraph6, parse_graph6
from .model import (
    OrientedGraph,
    SimpleGraph,
    complement,
    complete_graph,
    cycle_graph,
    underlying,
)

__all__ = [
    "CanonicalForm",
    "OrientedGraph",
    "SimpleGraph",
    "canonical_graph",
    "canonical_label",
    "canonical_permutation",
    "complement",
    "complete_graph",
    "converse_free_label",
    "cycle_graph",
    "emit_digraph6",
    "emit_graph6",
    "enumerate_orientations",
    "enumerate_simple_graphs",
    "extend_level",
    "graph_levels",
    "gray_code",
    "is_isomorphic",
    "orientation_from_mask",
    "parse_digraph6",
    "parse_graph6",
    "underlying",
]
