"""Lines (closed copies of B) and points (closed copies of A), peeling, and coloring.

Every line and point owns a set of underlying vertices.  For structures
extracted from a graph these are real vertices; abstract structures give
each point one private vertex and each line ``extra_mass`` further private
vertices.  Peeling deletes vertices, and a line or point survives only while
all of its vertices do.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Hashable, Sequence

from .errors import (
    InvalidInput,
    NoMatchingRow,
    NotFree,
    PartialColoring,
    PreconditionFailed,
    SizeLimitExceeded,
)
from .matrices import BinaryMatrix, k_config_check
from .predim import Alpha, Embedding, Graph, closed_embeddings, closure, is_closed


@dataclass(frozen=True)
class Line:
    id: Hashable
    points: tuple  # ordered: position i is matrix column i
    extra_mass: int = 0
    vertices: frozenset | None = None


@dataclass(frozen=True)
class IncidenceStructure:
    points: tuple
    lines: tuple[Line, ...]
    point_vertices: dict | None = None  # point id -> frozenset of vertices; None for abstract

    def __post_init__(self):
        pset = set(self.points)
        if len(pset) != len(self.points):
            raise InvalidInput("duplicate point ids")
        ids = [ln.id for ln in self.lines]
        if len(set(ids)) != len(ids):
            raise InvalidInput("duplicate line ids")
        for ln in self.lines:
            if not set(ln.points) <= pset:
                raise InvalidInput(f"line {ln.id!r} has unknown points")
            if len(set(ln.points)) != len(ln.points):
                raise InvalidInput(f"line {ln.id!r} repeats a point")

    @classmethod
    def abstract(cls, lines: dict, points: Sequence | None = None, extra_mass: dict | None = None):
        """Build from ``{line_id: [point ids]}``."""
        extra_mass = extra_mass or {}
        if points is None:
            seen = []
            for pts in lines.values():
                for p in pts:
                    if p not in seen:
                        seen.append(p)
            points = seen
        return cls(tuple(points), tuple(Line(k, tuple(v), extra_mass.get(k, 0)) for k, v in lines.items()))

    def line(self, line_id) -> Line:
        for ln in self.lines:
            if ln.id == line_id:
                return ln
        raise InvalidInput(f"unknown line {line_id!r}")

    def line_index(self, line_id) -> int:
        for i, ln in enumerate(self.lines):
            if ln.id == line_id:
                return i
        raise InvalidInput(f"unknown line {line_id!r}")

    def vertices_of_point(self, p) -> frozenset:
        if self.point_vertices is None:
            return frozenset({("pt", p)})
        return self.point_vertices[p]

    def vertices_of_line(self, ln: Line) -> frozenset:
        if ln.vertices is not None:
            return ln.vertices
        out = set()
        for p in ln.points:
            out |= self.vertices_of_point(p)
        out |= {("line", ln.id, i) for i in range(ln.extra_mass)}
        return frozenset(out)

    def to_json(self) -> dict:
        return {
            "points": list(self.points),
            "lines": [{"id": ln.id, "points": list(ln.points), "extra_mass": ln.extra_mass} for ln in self.lines],
        }

    @classmethod
    def from_json(cls, data: dict) -> "IncidenceStructure":
        try:
            lines = tuple(Line(d["id"], tuple(d["points"]), int(d.get("extra_mass", 0))) for d in data["lines"])
            return cls(tuple(data["points"]), lines)
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"bad incidence JSON: {exc}") from exc


def fano_plane() -> IncidenceStructure:
    lines = [(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)]
    return IncidenceStructure.abstract({i: ln for i, ln in enumerate(lines)}, points=range(7))


def extract_incidence(X: Graph, A: Graph, B: Graph, alpha: Alpha) -> IncidenceStructure:
    """Lines are closed copies of B in X, points closed copies of A in X.

    A line lists its points in the order of B's own closed copies of A (sorted
    by vertex order of B), transported by the line's embedding.
    """
    slots = closed_embeddings(A, B, alpha)
    if not slots:
        raise PreconditionFailed("A has no closed copy in B")
    a_copies = closed_embeddings(A, X, alpha)
    pid = {c.image: i for i, c in enumerate(a_copies)}
    lines = []
    for li, emb in enumerate(_closed_B_copies(X, B, alpha, slots, a_copies)):
        phi = emb.as_dict()
        pts = []
        for s in slots:
            image = frozenset(phi[v] for v in s.image)
            if image not in pid:
                raise PreconditionFailed("a slot of a B-line is not a closed A-copy of X")
            pts.append(pid[image])
        lines.append(Line(li, tuple(pts), len(B) - sum(len(s.image) for s in slots), emb.image))
    return IncidenceStructure(tuple(range(len(a_copies))), tuple(lines), {i: c.image for i, c in enumerate(a_copies)})


def _closed_B_copies(X: Graph, B: Graph, alpha: Alpha, slots, a_copies) -> list[Embedding]:
    """Closed copies of B in X.

    When B is the closure of every pair of its slots, a closed copy of B is
    the closure in X of any two of its points, so pairs of points give all
    candidates and subgraph matching is avoided.  Otherwise fall back to it.
    """
    from itertools import combinations

    from networkx.algorithms.isomorphism import vf2pp_isomorphism

    generated = len(slots) >= 2 and all(
        closure(s.image | t.image, B, alpha) == frozenset(B.vertices) for s, t in combinations(slots, 2)
    )
    if not generated:
        return closed_embeddings(B, X, alpha)
    b_nx = B.to_networkx()
    found = {}
    for s, t in combinations(a_copies, 2):
        image = closure(s.image | t.image, X, alpha)
        if len(image) != len(B) or image in found:
            continue
        iso = vf2pp_isomorphism(b_nx, X.induced(image).to_networkx())
        if iso is not None:
            found[image] = Embedding(tuple((b, iso[b]) for b in B.vertices), image)
    order = {v: i for i, v in enumerate(X.vertices)}
    return sorted(found.values(), key=lambda e: sorted(order[v] for v in e.image))


def is_k_pseudoplane(I: IncidenceStructure, k: int) -> bool:
    if k < 2:
        raise InvalidInput("k must be at least 2")
    sets = [set(ln.points) for ln in I.lines]
    return all(len(a & b) <= k - 1 for a, b in combinations(sets, 2))


def _line_graph(I: IncidenceStructure) -> list[list[int]]:
    on = {}
    for i, ln in enumerate(I.lines):
        for p in ln.points:
            on.setdefault(p, []).append(i)
    nbrs = [set() for _ in I.lines]
    for ls in on.values():
        for a, b in combinations(ls, 2):
            nbrs[a].add(b)
            nbrs[b].add(a)
    return [sorted(s) for s in nbrs]


def line_distance(I: IncidenceStructure, l1, l2) -> int | None:
    """Fewest steps between two lines through shared points; None if unreachable."""
    a, b = I.line_index(l1), I.line_index(l2)
    nbrs = _line_graph(I)
    dist = {a: 0}
    q = deque([a])
    while q:
        u = q.popleft()
        if u == b:
            return dist[u]
        for v in nbrs[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return None


CYCLE_LINE_LIMIT = 64


def find_cycle(I: IncidenceStructure, m: int):
    """m distinct lines in cyclic order whose consecutive intersections are
    nonempty and pairwise disjoint.

    Returns ``(line ids, points)`` where ``points[i]`` is a point on lines i
    and i+1 (mod m), or None.  The cycle starts at its smallest line index.
    """
    if m < 3:
        raise InvalidInput("cycles need m >= 3")
    if len(I.lines) > CYCLE_LINE_LIMIT:
        raise SizeLimitExceeded(f"cycle search handles at most {CYCLE_LINE_LIMIT} lines")
    sets = [set(ln.points) for ln in I.lines]
    nbrs = _line_graph(I)

    def disjoint_from(meet, used):
        return all(not (meet & u) for u in used)

    def extend(path, used):
        if len(path) == m:
            closing = sets[path[-1]] & sets[path[0]]
            if closing and disjoint_from(closing, used):
                return path, used + [closing]
            return None
        for v in nbrs[path[-1]]:
            if v <= path[0] or v in path:
                continue
            meet = sets[path[-1]] & sets[v]
            if disjoint_from(meet, used):
                got = extend(path + [v], used + [meet])
                if got:
                    return got
        return None

    for start in range(len(I.lines)):
        got = extend([start], [])
        if got:
            path, meets = got
            return [I.lines[i].id for i in path], [min(mt, key=str) for mt in meets]
    return None


@dataclass
class PeelState:
    alive_vertices: set
    alive_lines: list[bool]
    removed: list = field(default_factory=list)  # line ids in the order they died
    log: list = field(default_factory=list)  # (line id, shared count, action)
    sweeps: int = 0

    def alive_points(self, I: IncidenceStructure) -> list:
        return [p for p in I.points if I.vertices_of_point(p) <= self.alive_vertices]

    def points_per_line(self, I: IncidenceStructure) -> dict:
        alive = set(self.alive_points(I))
        return {ln.id: [p for p in ln.points if p in alive] for ln, ok in zip(I.lines, self.alive_lines) if ok}

    def to_json(self) -> dict:
        return {
            "removed": list(self.removed),
            "log": [list(e) for e in self.log],
            "sweeps": self.sweeps,
            "alive_lines": [i for i, ok in enumerate(self.alive_lines) if ok],
        }


def _resolve_order(I: IncidenceStructure, order) -> list[int]:
    n = len(I.lines)
    if order is None:
        return list(range(n))
    if isinstance(order, random.Random):
        idx = list(range(n))
        order.shuffle(idx)
        return idx
    idx = [I.line_index(x) for x in order]
    if sorted(idx) != list(range(n)):
        raise InvalidInput("order must list every line exactly once")
    return idx


def peel_to_fixpoint(I: IncidenceStructure, k: int, order=None) -> PeelState:
    """Sweep lines cyclically in ``order`` until a full sweep changes nothing.

    A live line whose points shared with other live lines number at most k
    loses everything except those shared points; every line or point using
    a deleted vertex dies.  ``order`` is a list of line ids, a
    ``random.Random`` (shuffled once), or None for the stored order.
    """
    if k < 2:
        raise InvalidInput("k must be at least 2")
    seq = _resolve_order(I, order)
    line_verts = [I.vertices_of_line(ln) for ln in I.lines]
    state = PeelState(set().union(*line_verts) if line_verts else set(), [True] * len(I.lines))
    for p in I.points:
        state.alive_vertices |= I.vertices_of_point(p)
    changed = True
    while changed:
        changed = False
        state.sweeps += 1
        for i in seq:
            if not state.alive_lines[i]:
                continue
            ln = I.lines[i]
            shared = [
                p
                for p in ln.points
                if any(state.alive_lines[j] and p in I.lines[j].points for j in range(len(I.lines)) if j != i)
            ]
            if len(shared) > k:
                state.log.append((ln.id, len(shared), "kept"))
                continue
            keep = set()
            for p in shared:
                keep |= I.vertices_of_point(p)
            H = line_verts[i] - keep
            if not H:
                state.log.append((ln.id, len(shared), "nothing to remove"))
                continue
            state.alive_vertices -= H
            state.log.append((ln.id, len(shared), "peeled"))
            for j, verts in enumerate(line_verts):
                if state.alive_lines[j] and verts & H:
                    state.alive_lines[j] = False
                    state.removed.append(I.lines[j].id)
                    if j != i:
                        state.log.append((I.lines[j].id, None, "destroyed"))
            changed = True
    return state


def is_free_k_pseudoplane(I: IncidenceStructure, k: int, order=None) -> tuple[bool, PeelState]:
    state = peel_to_fixpoint(I, k, order)
    return not state.alive_points(I), state


@dataclass(frozen=True)
class Coloring:
    color: dict

    def to_json(self) -> dict:
        return {str(p): int(c) for p, c in self.color.items()}

    @classmethod
    def from_json(cls, data: dict, I: IncidenceStructure | None = None) -> "Coloring":
        lookup = {str(p): p for p in I.points} if I is not None else {}
        return cls({lookup.get(k, k): int(v) for k, v in data.items()})


def _points_per_line(I: IncidenceStructure) -> int:
    sizes = {len(ln.points) for ln in I.lines}
    if len(sizes) > 1:
        raise PreconditionFailed("lines carry different numbers of points")
    return sizes.pop() if sizes else 0


def consistent_coloring(
    I: IncidenceStructure, M: BinaryMatrix, k: int, order=None, check: bool = True
) -> Coloring:
    """Color points so every line reads a row of M.

    Lines are colored in reverse peel order.  The last line peeled takes the
    first row; each earlier line takes the first row agreeing with its
    already-colored points.  With ``check`` the free test and the
    k-configuration condition are verified first.
    """
    free, state = is_free_k_pseudoplane(I, k, order)
    if check:
        if not free:
            raise NotFree("structure is not a free k-pseudoplane")
        width = _points_per_line(I)
        if I.lines and M.n_cols != width:
            raise PreconditionFailed(f"matrix has {M.n_cols} columns, lines have {width} points")
        if I.lines and not k_config_check(M, k).holds:
            raise PreconditionFailed(f"matrix fails the {k}-configuration condition")
    elif not free:
        raise NotFree("structure is not a free k-pseudoplane")
    rows = M.rows()
    color: dict = {}
    for line_id in reversed(state.removed):
        ln = I.line(line_id)
        if len(ln.points) != M.n_cols:
            raise PreconditionFailed(f"line {line_id!r} has {len(ln.points)} points, matrix has {M.n_cols} columns")
        fixed = [(c, color[p]) for c, p in enumerate(ln.points) if p in color]
        row = next((r for r in rows if all(r[c] == v for c, v in fixed)), None)
        if row is None:
            raise NoMatchingRow(f"no row of the matrix extends the colors on line {line_id!r}")
        for c, p in enumerate(ln.points):
            color.setdefault(p, row[c])
    for p in I.points:
        color.setdefault(p, 0)
    return Coloring(color)


def verify_coloring(I: IncidenceStructure, M: BinaryMatrix, f: Coloring) -> bool:
    missing = [p for p in I.points if p not in f.color]
    if missing:
        raise PartialColoring(f"{len(missing)} points are uncolored")
    rows = set(M.rows())
    return all(tuple(f.color[p] for p in ln.points) in rows for ln in I.lines)


def write_incidence(I: IncidenceStructure, path) -> None:
    from pathlib import Path

    Path(path).write_text(json.dumps(I.to_json(), sort_keys=True, indent=1))
