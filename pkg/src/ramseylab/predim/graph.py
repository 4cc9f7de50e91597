"""Finite simple graphs with optional free-amalgam decomposition metadata."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from ..errors import InvalidInput


@dataclass(frozen=True)
class Decomposition:
    """B is the free amalgam over ``base`` of the graphs ``base + piece_i``.

    Pieces are pairwise disjoint, disjoint from the base, and no edge joins two
    different pieces.
    """

    base: frozenset
    pieces: tuple[frozenset, ...]


class Graph:
    """Immutable simple undirected graph on hashable labels.

    Vertex order is the insertion order and defines the index used by the
    bitmask adjacency ``adj[i]``.
    """

    __slots__ = ("_vertices", "_index", "_adj", "_edges", "_decomp")

    def __init__(self, vertices: Iterable[Hashable], edges: Iterable[Sequence[Hashable]] = (), decomposition=None):
        verts = tuple(vertices)
        index = {v: i for i, v in enumerate(verts)}
        if len(index) != len(verts):
            raise InvalidInput("duplicate vertex labels")
        adj = [0] * len(verts)
        edge_set = set()
        for e in edges:
            if len(e) != 2:
                raise InvalidInput(f"edge {e!r} is not a pair")
            u, v = e
            if u not in index or v not in index:
                raise InvalidInput(f"edge {e!r} references an unknown vertex")
            i, j = index[u], index[v]
            if i == j:
                raise InvalidInput(f"loop at {u!r}")
            if i > j:
                i, j = j, i
            if (i, j) in edge_set:
                continue
            edge_set.add((i, j))
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        self._vertices = verts
        self._index = index
        self._adj = tuple(adj)
        self._edges = frozenset(edge_set)
        self._decomp = None
        if decomposition is not None:
            self._decomp = self._validate_decomposition(decomposition)

    def _validate_decomposition(self, dec: Decomposition) -> Decomposition:
        base = frozenset(dec.base)
        pieces = tuple(frozenset(p) for p in dec.pieces)
        seen = set(base)
        for p in pieces:
            if seen & p:
                raise InvalidInput("decomposition pieces overlap")
            seen |= p
        if seen != set(self._vertices):
            raise InvalidInput("decomposition does not cover the vertex set")
        owner = {}
        for k, p in enumerate(pieces):
            for v in p:
                owner[v] = k
        for i, j in self._edges:
            a, b = owner.get(self._vertices[i]), owner.get(self._vertices[j])
            if a is not None and b is not None and a != b:
                raise InvalidInput("an edge joins two different pieces")
        return Decomposition(base, pieces)

    # --- basic accessors ---
    @property
    def vertices(self) -> tuple:
        return self._vertices

    @property
    def adj(self) -> tuple[int, ...]:
        return self._adj

    @property
    def decomposition(self) -> Decomposition | None:
        return self._decomp

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v) -> bool:
        return v in self._index

    def index(self, v) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise InvalidInput(f"unknown vertex {v!r}") from None

    def edges(self) -> list[tuple]:
        vs = self._vertices
        return [(vs[i], vs[j]) for i, j in sorted(self._edges)]

    def n_edges(self) -> int:
        return len(self._edges)

    def has_edge(self, u, v) -> bool:
        return bool(self._adj[self.index(u)] >> self.index(v) & 1)

    def neighbors(self, v) -> list:
        a = self._adj[self.index(v)]
        return [self._vertices[j] for j in range(len(self._vertices)) if a >> j & 1]

    def mask(self, vertices: Iterable) -> int:
        m = 0
        for v in vertices:
            m |= 1 << self.index(v)
        return m

    def labels(self, mask: int) -> frozenset:
        out = []
        i = 0
        while mask:
            if mask & 1:
                out.append(self._vertices[i])
            mask >>= 1
            i += 1
        return frozenset(out)

    def edges_in_mask(self, mask: int) -> int:
        total = 0
        m = mask
        while m:
            low = m & -m
            i = low.bit_length() - 1
            total += (self._adj[i] & mask).bit_count()
            m ^= low
        return total // 2

    def edge_count(self, vertices: Iterable) -> int:
        return self.edges_in_mask(self.mask(vertices))

    def induced(self, vertices: Iterable) -> "Graph":
        keep = set(vertices)
        for v in keep:
            self.index(v)
        verts = [v for v in self._vertices if v in keep]
        return Graph(verts, [(u, v) for u, v in self.edges() if u in keep and v in keep])

    def relabel(self, mapping) -> "Graph":
        dec = None
        if self._decomp is not None:
            dec = Decomposition(
                frozenset(mapping[v] for v in self._decomp.base),
                tuple(frozenset(mapping[v] for v in p) for p in self._decomp.pieces),
            )
        return Graph([mapping[v] for v in self._vertices], [(mapping[u], mapping[v]) for u, v in self.edges()], dec)

    def with_decomposition(self, dec: Decomposition | None) -> "Graph":
        return Graph(self._vertices, self.edges(), dec)

    def triangle_count(self) -> int:
        count = 0
        for i, j in self._edges:
            count += (self._adj[i] & self._adj[j]).bit_count()
        return count // 3

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self._vertices)
        g.add_edges_from(self.edges())
        return g

    def same_structure(self, other: "Graph") -> bool:
        return set(self._vertices) == set(other._vertices) and {frozenset(e) for e in self.edges()} == {
            frozenset(e) for e in other.edges()
        }

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self):
        return hash((self._vertices, self._edges))

    def __repr__(self):
        return f"Graph(|V|={len(self)}, |E|={self.n_edges()})"

    # --- serialization ---
    def to_json(self) -> dict:
        out = {"vertices": list(self._vertices), "edges": [list(e) for e in self.edges()]}
        if self._decomp is not None:
            order = {v: i for i, v in enumerate(self._vertices)}
            out["pieces"] = {
                "base": sorted(self._decomp.base, key=order.get),
                "pieces": [sorted(p, key=order.get) for p in self._decomp.pieces],
            }
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        if "vertices" not in data or "edges" not in data:
            raise InvalidInput("graph JSON needs 'vertices' and 'edges'")
        dec = None
        if data.get("pieces"):
            base = frozenset(map(_label, data["pieces"]["base"]))
            dec = Decomposition(base, tuple(frozenset(map(_label, p)) for p in data["pieces"]["pieces"]))
        edges = [(_label(u), _label(v)) for u, v in data["edges"]]
        return cls([_label(v) for v in data["vertices"]], edges, dec)


def _label(v):
    """JSON turns tuple labels into lists; turn them back."""
    return tuple(_label(x) for x in v) if isinstance(v, list) else v


def complete_graph(n: int, start=0) -> Graph:
    vs = list(range(start, start + n))
    return Graph(vs, [(u, v) for i, u in enumerate(vs) for v in vs[i + 1 :]])


def complete_bipartite(p: int, q: int, start=0) -> Graph:
    left = list(range(start, start + p))
    right = list(range(start + p, start + p + q))
    return Graph(left + right, [(u, v) for u in left for v in right])


def empty_graph(n: int, start=0) -> Graph:
    return Graph(range(start, start + n))


def read_graph(path) -> Graph:
    return Graph.from_json(json.loads(Path(path).read_text()))


def write_graph(G: Graph, path) -> None:
    Path(path).write_text(json.dumps(G.to_json(), sort_keys=True, indent=1))
