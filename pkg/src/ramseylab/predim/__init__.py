"""Pre-dimension calculus on finite graphs for a quadratic irrational alpha."""

from .diophantine import ApproxPair, approx_below, continued_fraction, convergents, hit_interval, scan_window
from .engines import BRUTE_LIMIT
from .graph import Decomposition, Graph, complete_bipartite, complete_graph, empty_graph, read_graph, write_graph
from .numbers import GOLDEN_CONJUGATE, SQRT2_MINUS_1, Alpha, DeltaValue, QuadNumber, parse_alpha
from .ops import (
    Embedding,
    closed_embeddings,
    closure,
    delta,
    delta_of,
    free_amalgam,
    induced_copies,
    is_closed,
    kalpha_member,
    min_delta_over,
    rel_delta,
)

__all__ = [
    "Alpha",
    "ApproxPair",
    "BRUTE_LIMIT",
    "Decomposition",
    "DeltaValue",
    "Embedding",
    "GOLDEN_CONJUGATE",
    "Graph",
    "QuadNumber",
    "SQRT2_MINUS_1",
    "approx_below",
    "closed_embeddings",
    "closure",
    "complete_bipartite",
    "complete_graph",
    "continued_fraction",
    "convergents",
    "delta",
    "delta_of",
    "empty_graph",
    "free_amalgam",
    "hit_interval",
    "induced_copies",
    "is_closed",
    "kalpha_member",
    "min_delta_over",
    "parse_alpha",
    "read_graph",
    "rel_delta",
    "scan_window",
    "write_graph",
]
