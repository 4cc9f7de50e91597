"""Pre-dimension, closedness, closures, amalgams and copies of a pattern."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import IncompatibleOverlap, InvalidInput, SizeLimitExceeded
from .engines import BRUTE_LIMIT, min_delta_mask, subset_table
from .graph import Decomposition, Graph
from .numbers import Alpha, DeltaValue


def delta(G: Graph, alpha: Alpha) -> DeltaValue:
    return DeltaValue(len(G), G.n_edges(), alpha)


def delta_of(G: Graph, S: Iterable, alpha: Alpha) -> DeltaValue:
    """delta of the subgraph induced on S."""
    m = G.mask(S)
    return DeltaValue(m.bit_count(), G.edges_in_mask(m), alpha)


def rel_delta(G: Graph, S: Iterable, T: Iterable, alpha: Alpha) -> DeltaValue:
    """delta(S | T) - delta(T) on induced subgraphs."""
    s, t = G.mask(S), G.mask(T)
    u = s | t
    return DeltaValue(u.bit_count() - t.bit_count(), G.edges_in_mask(u) - G.edges_in_mask(t), alpha)


def min_delta_over(A: Iterable, B: Graph, alpha: Alpha, engine: str = "auto") -> tuple[frozenset, DeltaValue]:
    """The set C with A <= C <= V(B) minimizing delta, and delta(C).

    The minimizer is unique (see :mod:`.engines`), so no tie-breaking is
    ever exercised in practice.
    """
    m, val, _ = min_delta_mask(B, B.mask(A), alpha, engine)
    return B.labels(m), val


def is_closed(A: Iterable, B: Graph, alpha: Alpha, engine: str = "auto") -> bool:
    a = B.mask(A)
    m, _, _ = min_delta_mask(B, a, alpha, engine)
    return m == a


def kalpha_member(G: Graph, alpha: Alpha, engine: str = "auto") -> tuple[bool, frozenset | None]:
    """Whether every induced subgraph has delta >= 0.

    The brute engine reports a smallest violating set (lexicographically
    first by vertex order among those); the others report the
    delta-minimizing set.
    """
    if engine == "auto":
        engine = "brute" if len(G) <= BRUTE_LIMIT else "mincut"
    if engine == "brute":
        if len(G) > BRUTE_LIMIT:
            raise SizeLimitExceeded(f"{len(G)} vertices exceed the brute-force limit {BRUTE_LIMIT}")
        free = list(range(len(G)))
        sizes, edges = subset_table(G, 0, free)
        values = sizes - alpha.value * edges
        suspects = np.flatnonzero(values < 1e-7)
        bad = [int(t) for t in suspects if DeltaValue(int(sizes[t]), int(edges[t]), alpha).sign() < 0]
        if not bad:
            return True, None
        best = min(bad, key=lambda t: (int(sizes[t]), _bits(t)))
        return False, G.labels(best)
    m, val, _ = min_delta_mask(G, 0, alpha, engine)
    if val.sign() < 0:
        return False, G.labels(m)
    return True, None


def _bits(t: int) -> tuple[int, ...]:
    out = []
    i = 0
    while t:
        if t & 1:
            out.append(i)
        t >>= 1
        i += 1
    return tuple(out)


def closure(A: Iterable, N: Graph, alpha: Alpha, engine: str = "auto") -> frozenset:
    """Smallest closed superset of A inside N.

    Replaces the current set by the delta-minimizer above it until the set
    is closed.  The minimizer is already the closure, so the loop body runs
    once; the loop keeps the definition visible.
    """
    cur = N.mask(A)
    while True:
        m, _, _ = min_delta_mask(N, cur, alpha, engine)
        if m == cur:
            return N.labels(cur)
        cur = m


def free_amalgam(B: Graph, C: Graph, A: Iterable | None = None) -> Graph:
    """Union of B and C over their common vertices, adding no edges."""
    shared = set(B.vertices) & set(C.vertices)
    if A is not None and set(A) != shared:
        raise IncompatibleOverlap("A must equal the common vertex set of B and C")
    sb = {frozenset(e) for e in B.edges() if set(e) <= shared}
    sc = {frozenset(e) for e in C.edges() if set(e) <= shared}
    if sb != sc:
        raise IncompatibleOverlap("B and C induce different graphs on the shared vertices")
    verts = list(B.vertices) + [v for v in C.vertices if v not in shared]
    edges = B.edges() + [e for e in C.edges() if not set(e) <= shared]
    dec = _merge_decompositions(B, C, shared)
    return Graph(verts, edges, dec)


def _merge_decompositions(B: Graph, C: Graph, shared: set) -> Decomposition | None:
    """Decomposition of an amalgam when both sides carry one and share only base vertices."""
    db, dc = B.decomposition, C.decomposition
    if db is None or dc is None:
        return None
    if not shared <= db.base or not shared <= dc.base:
        return None
    return Decomposition(db.base | dc.base, db.pieces + dc.pieces)


@dataclass(frozen=True)
class Embedding:
    mapping: tuple[tuple, ...]  # (pattern vertex, host vertex) in pattern order
    image: frozenset

    def as_dict(self) -> dict:
        return dict(self.mapping)


def induced_copies(A: Graph, X: Graph) -> list[Embedding]:
    """One embedding per image set of an induced copy of A in X."""
    from networkx.algorithms.isomorphism import GraphMatcher

    if len(A) > len(X):
        return []
    gm = GraphMatcher(X.to_networkx(), A.to_networkx())
    seen = {}
    for iso in gm.subgraph_isomorphisms_iter():
        image = frozenset(iso)
        if image not in seen:
            inv = {a: x for x, a in iso.items()}
            seen[image] = Embedding(tuple((a, inv[a]) for a in A.vertices), image)
    order = {v: i for i, v in enumerate(X.vertices)}
    return sorted(seen.values(), key=lambda e: sorted(order[v] for v in e.image))


def closed_embeddings(
    A: Graph, X: Graph, alpha: Alpha, closed_only: bool = True, engine: str = "auto"
) -> list[Embedding]:
    copies = induced_copies(A, X)
    if closed_only:
        copies = [c for c in copies if is_closed(c.image, X, alpha, engine)]
    return copies
