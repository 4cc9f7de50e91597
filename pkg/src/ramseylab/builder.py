"""Explicit graph constructions with independently re-checked reports.

``build_EF``  attaches a complete bipartite E to a sparse F so that
              delta(E/F) lands just below zero without new triangles.
``build_AB``  builds the pair (K3; B): n triangles joined by one bipartite
              piece X_u for every set u of at least two triangles.
``glue_lines`` and ``extend_generic`` are free amalgams of such B over
triangles, used as fixtures for the incidence machinery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from .errors import InfeasiblePattern, NotFound, ParameterError, PreconditionFailed
from .predim import (
    Alpha,
    Decomposition,
    DeltaValue,
    Graph,
    closed_embeddings,
    complete_graph,
    delta,
    delta_of,
    free_amalgam,
    induced_copies,
    is_closed,
    kalpha_member,
    min_delta_over,
    rel_delta,
    scan_window,
)
from .predim.engines import subset_table


@dataclass
class VerificationReport:
    """Named checks; ``checks[name] = (passed, exact detail string)``."""

    checks: dict[str, tuple[bool, str]] = field(default_factory=dict)

    def add(self, name: str, passed: bool, detail="") -> None:
        self.checks[name] = (bool(passed), str(detail))

    @property
    def ok(self) -> bool:
        return all(p for p, _ in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, (p, _) in self.checks.items() if not p]

    def to_json(self) -> dict:
        return {"ok": self.ok, "checks": {k: {"passed": p, "detail": d} for k, (p, d) in sorted(self.checks.items())}}


def _dv(x: DeltaValue) -> str:
    return f"{x} ~ {float(x):.6f}"


# --- EF --------------------------------------------------------------------------


@dataclass(frozen=True)
class EFParams:
    alpha: Alpha
    N: int
    m: int
    r: int
    s: int
    r0: int
    r1: int
    m0: int
    m1: int
    attach: tuple  # (f_k1, f_k2, f_k3, f_k4)
    E: tuple
    F: tuple

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.spec(),
            "N": self.N,
            "m": self.m,
            "r": self.r,
            "s": self.s,
            "r0": self.r0,
            "r1": self.r1,
            "m0": self.m0,
            "m1": self.m1,
            "attach": list(self.attach),
            "E": list(self.E),
            "F": list(self.F),
        }


def _free_pairs(F: Graph):
    """Four distinct vertices k1, k2, k3, k4 of F with k1, k3 and k2, k4 non-adjacent."""
    vs = F.vertices
    non_edges = [(u, v) for u, v in combinations(vs, 2) if not F.has_edge(u, v)]
    for (a, b), (c, d) in combinations(non_edges, 2):
        if len({a, b, c, d}) == 4:
            return a, c, b, d
    return None


def _min_nonempty_delta(F: Graph, alpha: Alpha) -> DeltaValue:
    sizes, edges = subset_table(F, 0, list(range(len(F))))
    vals = sizes[1:] - alpha.value * edges[1:]
    lo = vals.min()
    best = None
    for t in (vals <= lo + 1e-7).nonzero()[0]:
        d = DeltaValue(int(sizes[t + 1]), int(edges[t + 1]), alpha)
        if best is None or d < best:
            best = d
    return best


def build_EF(alpha: Alpha, N: int, F: Graph, r_cap: int = 10**5) -> tuple[Graph, EFParams, VerificationReport]:
    if N < 1:
        raise ParameterError("N must be positive")
    if len(F) < 4:
        raise PreconditionFailed(f"F needs at least 4 vertices, has {len(F)}")
    attach = _free_pairs(F)
    if attach is None:
        raise PreconditionFailed("F needs two disjoint non-adjacent vertex pairs")
    ok, bad = kalpha_member(F, alpha)
    if not ok:
        raise PreconditionFailed(f"F is not in K_alpha (violating set {sorted(bad)})")
    if _min_nonempty_delta(F, alpha) < Fraction(1, N):
        raise PreconditionFailed(f"some nonempty subset of F has delta below 1/{N}")

    m = alpha.m()
    r_min = m * m + Fraction(m + 1, N)
    r_min = int(r_min) + 1  # strict inequality r > m^2 + (m+1)/N
    lo = Fraction(-1, N)
    while True:
        pair = scan_window(alpha, lo, 0, lo_open=True, hi_open=True, r_min=r_min, r_cap=r_cap)
        r, s = pair.r, pair.s
        r0, r1 = r - m, m
        total = s - r0 * r1
        # every cross edge goes to a distinct E vertex, so total <= r
        if r0 >= 1 and len(F) <= total <= r:
            break
        r_min = r + 1
        if r_min > r_cap:
            raise NotFound(f"no admissible (r, s) with r <= {r_cap}")
    m0 = min(r0, total)
    m1 = total - m0

    labels = list(F.vertices)
    fresh = _fresh_labels(labels, r)
    e1, e2 = fresh[:r0], fresh[r0:]
    k1, k2, _, _ = attach
    edges = list(F.edges())
    edges += [(x, y) for x in e1 for y in e2]
    edges += [(e1[i], k1) for i in range(m0)]
    edges += [(e2[i], k2) for i in range(m1)]
    EF = Graph(labels + fresh, edges)
    params = EFParams(alpha, N, m, r, s, r0, r1, m0, m1, attach, tuple(fresh), tuple(labels))
    return EF, params, verify_EF(EF, params, F)


def _fresh_labels(existing, count: int) -> list:
    if all(isinstance(v, int) for v in existing):
        start = max(existing, default=-1) + 1
        return list(range(start, start + count))
    return [("new", i) for i in range(count)]


def verify_EF(EF: Graph, p: EFParams, F: Graph) -> VerificationReport:
    alpha = p.alpha
    rep = VerificationReport()
    d = rel_delta(EF, p.E, p.F, alpha)
    rep.add("delta_E_over_F_below_zero", d.sign() < 0, _dv(d))
    rep.add("delta_E_over_F_above_minus_1_over_N", (d - Fraction(-1, p.N)).sign() > 0, _dv(d))
    rep.add("delta_E_over_F_equals_r_minus_alpha_s", d == DeltaValue(p.r, p.s, alpha), f"r={p.r}, s={p.s}")
    ok, bad = kalpha_member(EF, alpha, engine="brute")
    rep.add("EF_in_K_alpha", ok, "full subset scan" if ok else sorted(bad))
    rep.add("triangles_only_in_F", EF.triangle_count() == F.triangle_count(), EF.triangle_count())
    F_set = set(p.F)
    k3 = complete_graph(3)
    closed_in_EF = closed_embeddings(k3, EF, alpha)
    rep.add(
        "closed_triangles_come_from_F",
        all(c.image <= F_set and is_closed(c.image, F, alpha) for c in closed_in_EF),
        len(closed_in_EF),
    )
    return rep


# --- (A; B) ---------------------------------------------------------------------


@dataclass(frozen=True)
class ABParams:
    alpha: Alpha
    n: int
    C: int
    r: int
    s: int
    pieces: tuple  # ((u, vertex labels), ...)

    @property
    def K(self) -> int:
        return 2**self.n - self.n - 1

    def epsilon(self) -> DeltaValue:
        return DeltaValue(-self.r, -self.s, self.alpha)  # alpha*s - r

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.spec(),
            "n": self.n,
            "C": self.C,
            "r_u": self.r,
            "s_u": self.s,
            "pieces": [{"u": list(u), "vertices": list(vs)} for u, vs in self.pieces],
        }


def triangle_vertices(j: int) -> tuple[int, int, int]:
    return (3 * j, 3 * j + 1, 3 * j + 2)


def ab_window(alpha: Alpha, n: int, C: int) -> tuple[DeltaValue, DeltaValue]:
    """(lo, hi) for r - alpha*s: lo = -(n-1)/K * delta(A) (open), hi = lo + 1/C (closed)."""
    K = 2**n - n - 1
    dA = DeltaValue(3, 3, alpha)
    lo = -dA.scale(Fraction(n - 1, K))
    return lo, lo + Fraction(1, C)


def build_AB(alpha: Alpha, n: int, C: int, r_cap: int = 10**5) -> tuple[Graph, Graph, ABParams, VerificationReport]:
    if n < 3:
        raise PreconditionFailed(f"n must be at least 3, got {n}")
    K = 2**n - n - 1
    if C <= 2 * K:
        raise ParameterError(f"C must exceed 2*(2^n-n-1) = {2 * K}, got {C}")
    lo, hi = ab_window(alpha, n, C)
    r_min = n  # every triangle in u needs a cross edge
    while True:
        pair = scan_window(alpha, lo, hi, lo_open=True, hi_open=False, r_min=r_min, r_cap=r_cap)
        r, s = pair.r, pair.s
        internal = s - r
        p_side = r // 2
        q_side = r - p_side
        nonneg = DeltaValue(r, internal, alpha).sign() >= 0
        if 0 <= internal <= p_side * q_side and nonneg:
            break
        r_min = r + 1

    A = complete_graph(3)
    verts = [v for j in range(n) for v in triangle_vertices(j)]
    edges = []
    for j in range(n):
        a, b, c = triangle_vertices(j)
        edges += [(a, b), (b, c), (a, c)]
    next_label = 3 * n
    pieces = []
    visits = [0] * n  # pieces already attached to each triangle
    for size in range(2, n + 1):
        for u in combinations(range(n), size):
            xs = list(range(next_label, next_label + r))
            next_label += r
            left, right = xs[:p_side], xs[p_side:]
            # internal edges: the first s - r pairs of K_{p,q} taken diagonal
            # by diagonal, which keeps degrees balanced
            pairs = [(left[i], right[(i + k) % q_side]) for k in range(q_side) for i in range(p_side)][:internal]
            edges += pairs
            # Left and right vertices meet different corners of a triangle, so
            # no triangle appears; rotating corners per visit gives every
            # corner a cross edge.
            for i, x in enumerate(xs):
                j = u[i % len(u)]
                corner = (visits[j] + (0 if i < p_side else 1)) % 3
                edges.append((x, triangle_vertices(j)[corner]))
            for j in u:
                visits[j] += 1
            verts += xs
            pieces.append((u, tuple(xs)))
    base = frozenset(v for j in range(n) for v in triangle_vertices(j))
    B = Graph(verts, edges, Decomposition(base, tuple(frozenset(xs) for _, xs in pieces)))
    params = ABParams(alpha, n, C, r, s, tuple(pieces))
    return A, B, params, verify_AB(A, B, params)


def verify_AB(A: Graph, B: Graph, p: ABParams) -> VerificationReport:
    """Re-derive every claimed property of (A; B) from the graphs alone."""
    alpha, n = p.alpha, p.n
    rep = VerificationReport()
    dA = delta(A, alpha)
    dB = delta(B, alpha)
    triangles = [frozenset(triangle_vertices(j)) for j in range(n)]

    lo, hi = ab_window(alpha, n, p.C)
    for u, xs in p.pieces:
        base = set().union(*(triangles[j] for j in u))
        d = rel_delta(B, xs, base, alpha)
        rep.add(f"piece_{'_'.join(map(str, u))}_in_window", (d - lo).sign() > 0 and (hi - d).sign() >= 0, _dv(d))
        internal = B.edge_count(xs)
        rep.add(f"piece_{'_'.join(map(str, u))}_nonneg", DeltaValue(len(xs), internal, alpha).sign() >= 0, internal)

    eps = p.epsilon()
    K = p.K
    star_lo = dA.scale(Fraction(n - 2, 2**n - n - 2))
    star_hi = dA.scale(Fraction(n - 1, K))
    rep.add("window_star", star_lo <= eps <= star_hi, f"{_dv(star_lo)} <= {_dv(eps)} <= {_dv(star_hi)}")

    k3 = complete_graph(3)
    copies = induced_copies(k3, B)
    closed = [c for c in copies if is_closed(c.image, B, alpha)]
    rep.add("triangle_census", len(copies) == n, len(copies))
    rep.add("closed_triangle_copies", len(closed) == n and {c.image for c in closed} == set(triangles), len(closed))
    rep.add("condition_1", all(dB >= delta_of(B, t, alpha) for t in triangles), f"delta(B) = {_dv(dB)}")
    cond2 = True
    for i, j in combinations(range(n), 2):
        cset, val = min_delta_over(triangles[i] | triangles[j], B, alpha)
        if cset != frozenset(B.vertices):
            cond2 = False
    rep.add("condition_2", cond2, "B is the unique delta-minimizer above every pair of triangles")
    ok_cut, bad_cut = kalpha_member(B, alpha, engine="mincut")
    _, min_all = min_delta_over((), B, alpha)
    rep.add("B_in_K_alpha", ok_cut and min_all.sign() >= 0, f"min delta over subsets = {_dv(min_all)}")
    dBA = rel_delta(B, B.vertices, triangles[0], alpha)
    half = dA.scale(Fraction(1, 2))
    rep.add("half_delta", dBA < half, f"delta(B/A) = {_dv(dBA)} < delta(A)/2 = {_dv(half)}")
    return rep


# --- amalgams of B over triangles -----------------------------------------------------


@dataclass(frozen=True)
class GluedLines:
    graph: Graph
    copies: tuple[dict, ...]  # vertex map B -> graph, one per placed copy


def _slots(A: Graph, B: Graph, alpha: Alpha):
    return closed_embeddings(A, B, alpha)


def glue_lines(
    B: Graph, A: Graph, pattern: str, count: int, alpha: Alpha, verify: bool = True
) -> GluedLines:
    """Free amalgams of ``count`` copies of B over single closed A-copies.

    chain  copy t+1 glues its slot 0 onto slot 1 of copy t
    star   every copy glues its slot 0 onto slot 0 of copy 0
    cycle  a chain whose last copy also glues its slot 1 onto slot 0 of copy 0
    """
    if count < 1:
        raise InfeasiblePattern("count must be positive")
    slots = _slots(A, B, alpha)
    need = {"chain": 2 if count > 1 else 1, "star": 1, "cycle": 2}
    if pattern not in need:
        raise InfeasiblePattern(f"unknown pattern {pattern!r}")
    if len(slots) < need[pattern]:
        raise InfeasiblePattern(f"B has {len(slots)} closed copies of A, pattern needs {need[pattern]}")
    if pattern == "cycle" and count < 3:
        raise InfeasiblePattern("a cycle needs at least 3 copies")
    slot_maps = [s.as_dict() for s in slots]

    def place(gid: int, glue_slot: int | None, target: dict | None) -> dict:
        """Vertex map for copy ``gid``; ``target`` maps A vertices to host labels."""
        fixed = {}
        if glue_slot is not None:
            for a, b in slot_maps[glue_slot].items():
                fixed[b] = target[a]
        return {v: fixed.get(v, (gid, v)) for v in B.vertices}

    def slot_target(copy_map: dict, slot: int) -> dict:
        return {a: copy_map[b] for a, b in slot_maps[slot].items()}

    maps = [place(0, None, None)]
    for t in range(1, count):
        if pattern == "star":
            maps.append(place(t, 0, slot_target(maps[0], 0)))
        else:
            maps.append(place(t, 0, slot_target(maps[t - 1], 1)))
    if pattern == "cycle":
        # identify slot 1 of the last copy with slot 0 of copy 0
        last = maps[-1]
        ident = {last[b]: maps[0][slot_maps[0][a]] for a, b in slot_maps[1].items()}
        maps[-1] = {v: ident.get(w, w) for v, w in last.items()}

    G = B.relabel(maps[0])
    for t in range(1, count):
        H = B.relabel(maps[t])
        shared = set(G.vertices) & set(H.vertices)
        if pattern == "cycle" and t == count - 1:
            G = _union_graph(G, H)
        else:
            G = free_amalgam(G, H, shared)
    # integer labels in placement order keep JSON simple
    relabel = {v: i for i, v in enumerate(G.vertices)}
    G = G.relabel(relabel)
    maps = [{v: relabel[w] for v, w in m.items()} for m in maps]
    out = GluedLines(G, tuple(maps))
    if verify:
        _verify_glued(out, alpha)
    return out


def _union_graph(G: Graph, H: Graph) -> Graph:
    verts = list(G.vertices) + [v for v in H.vertices if v not in G]
    seen = {frozenset(e) for e in G.edges()}
    edges = G.edges() + [e for e in H.edges() if frozenset(e) not in seen]
    return Graph(verts, edges)


def _verify_glued(g: GluedLines, alpha: Alpha) -> None:
    ok, bad = kalpha_member(g.graph, alpha)
    if not ok:
        raise InfeasiblePattern(f"glued graph leaves K_alpha (violating set of size {len(bad)})")
    for t, m in enumerate(g.copies):
        if not is_closed(set(m.values()), g.graph, alpha):
            raise InfeasiblePattern(f"copy {t} of B is not closed in the glued graph")


def extend_generic(
    M: Graph, A_image, B: Graph, A_pattern: Graph, alpha: Alpha, B_slot=None
) -> Graph:
    """Free amalgam of M with a copy of B over the closed set ``A_image``.

    ``B_slot`` picks the copy of ``A_pattern`` inside B (default: the first
    closed one).  Raises PreconditionFailed unless A_image is closed in M and
    induces A_pattern, and the slot is closed in B.
    """
    A_image = frozenset(A_image)
    if not is_closed(A_image, M, alpha):
        raise PreconditionFailed("A_image is not closed in M")
    host = M.induced(A_image)
    iso = induced_copies(A_pattern, host)
    if len(A_pattern) != len(host) or not iso:
        raise PreconditionFailed("A_image does not induce A_pattern")
    to_host = iso[0].as_dict()
    if B_slot is None:
        slots = closed_embeddings(A_pattern, B, alpha)
        if not slots:
            raise PreconditionFailed("A_pattern has no closed copy in B")
        to_B = slots[0].as_dict()
    else:
        cand = [e for e in induced_copies(A_pattern, B) if e.image == frozenset(B_slot)]
        if not cand or not is_closed(cand[0].image, B, alpha):
            raise PreconditionFailed("B_slot is not a closed copy of A_pattern in B")
        to_B = cand[0].as_dict()
    glue = {to_B[a]: to_host[a] for a in A_pattern.vertices}
    fresh = iter(_fresh_labels(list(M.vertices), len(B) - len(glue)))
    mapping = {v: glue[v] if v in glue else next(fresh) for v in B.vertices}
    B_img = B.relabel(mapping)
    M_next = free_amalgam(M, B_img, A_image)
    if not is_closed(set(mapping.values()), M_next, alpha):
        raise PreconditionFailed("new copy of B is not closed")  # ruled out by free amalgamation
    if not is_closed(M.vertices, M_next, alpha):
        raise PreconditionFailed("M is not closed in the extension")
    ok, _ = kalpha_member(M_next, alpha)
    if not ok:
        raise PreconditionFailed("extension leaves K_alpha")
    return M_next


def write_fixture(out_dir, name: str, graph: Graph, params: dict, report: VerificationReport, extra=None) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for suffix, payload in (("graph", graph.to_json()), ("params", params), ("report", report.to_json())):
        p = out / f"{name}.{suffix}.json"
        p.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        paths.append(p)
    for key, payload in (extra or {}).items():
        p = out / f"{name}.{key}.json"
        p.write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        paths.append(p)
    return paths
