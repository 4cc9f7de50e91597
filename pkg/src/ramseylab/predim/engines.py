"""Minimizing the pre-dimension over intermediate sets A <= C <= B.

delta(C) = |C| - alpha*e(C) is submodular and alpha is irrational, so the
minimizer over supersets of A is unique: two minimizers X, Y force X | Y and
X & Y to be minimizers too, and equal values mean equal (|C|, e(C)).  All
three engines therefore agree on the set, not just the value.

brute
    Edge counts of every subset of the free vertices, built by doubling
    (adding free vertex k to the first 2**k subsets).  Values are screened
    in floating point and the near-minimal ones compared exactly.
pieces
    For graphs that are a free amalgam over a small base, minimizes each
    piece independently for every subset of the base.
mincut
    Max-weight closure: choosing a free edge gains alpha and needs both
    endpoints; choosing a free vertex costs 1 and gains alpha per edge into
    A.  Solved by Dinic's algorithm with exact capacities in Z + Z*alpha.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..errors import InvalidInput, SizeLimitExceeded
from .graph import Graph
from .numbers import Alpha, DeltaValue

BRUTE_LIMIT = 22
PIECES_LIMIT = 22  # free base vertices + largest free piece
PIECES_BASE_LIMIT = 12  # above this the mincut engine is faster
SCREEN_TOL = 1e-7


def _resolve(cands, alpha: Alpha):
    """Exact argmin of ``v - alpha*e`` over (v, e, key, payload); ties by key."""
    best = None
    for v, e, key, payload in cands:
        val = DeltaValue(v, e, alpha)
        if best is None or val < best[0] or (val == best[0] and key < best[1]):
            best = (val, key, payload)
    return best[0], best[2]


def _near_min(values: np.ndarray) -> np.ndarray:
    lo = values.min()
    return np.flatnonzero(values <= lo + SCREEN_TOL)


def subset_table(G: Graph, base_mask: int, free: list[int]):
    """Sizes and edge counts of ``base + S`` for every subset S of ``free``.

    Bit k of the table index selects ``free[k]``.  Returns (sizes, edges) as
    int64 arrays of length 2**len(free).
    """
    f = len(free)
    pos = {v: k for k, v in enumerate(free)}
    adj_free = []
    deg_base = []
    for v in free:
        a = G.adj[v]
        adj_free.append(sum(1 << pos[w] for w in pos if a >> w & 1))
        deg_base.append((a & base_mask).bit_count())
    idx = np.arange(1 << f, dtype=np.int64)
    edges = np.zeros(1 << f, dtype=np.int64)
    for k in range(f):
        half = 1 << k
        low_adj = adj_free[k] & (half - 1)
        edges[half : 2 * half] = edges[:half] + np.bitwise_count(idx[:half] & low_adj) + deg_base[k]
    sizes = np.bitwise_count(idx).astype(np.int64)
    edges += G.edges_in_mask(base_mask)
    sizes += base_mask.bit_count()
    return sizes, edges


def _mask_from_table(index: int, free: list[int]) -> int:
    m = 0
    for k, v in enumerate(free):
        if index >> k & 1:
            m |= 1 << v
    return m


def _lex_key(mask: int) -> tuple[int, tuple[int, ...]]:
    bits = []
    i = 0
    while mask:
        if mask & 1:
            bits.append(i)
        mask >>= 1
        i += 1
    return (len(bits), tuple(bits))


def brute_min(G: Graph, A_mask: int, alpha: Alpha) -> tuple[int, DeltaValue]:
    free = [i for i in range(len(G)) if not A_mask >> i & 1]
    if len(free) > BRUTE_LIMIT:
        raise SizeLimitExceeded(f"{len(free)} free vertices exceed the brute-force limit {BRUTE_LIMIT}")
    sizes, edges = subset_table(G, A_mask, free)
    values = sizes - alpha.value * edges
    cands = []
    for t in _near_min(values):
        m = A_mask | _mask_from_table(int(t), free)
        cands.append((int(sizes[t]), int(edges[t]), _lex_key(m), m))
    val, m = _resolve(cands, alpha)
    return m, val


def pieces_min(G: Graph, A_mask: int, alpha: Alpha) -> tuple[int, DeltaValue]:
    dec = G.decomposition
    if dec is None:
        raise SizeLimitExceeded("graph carries no decomposition metadata")
    base = G.mask(dec.base)
    pieces = [G.mask(p) for p in dec.pieces]
    base_free = [i for i in range(len(G)) if base >> i & 1 and not A_mask >> i & 1]
    piece_free = [[i for i in range(len(G)) if p >> i & 1 and not A_mask >> i & 1] for p in pieces]
    widest = max((len(f) for f in piece_free), default=0)
    if len(base_free) + widest > PIECES_LIMIT:
        raise SizeLimitExceeded("decomposition too wide for the pieces engine")
    a_base = A_mask & base
    b_sizes, b_edges = subset_table(G, a_base, base_free)
    n_s = 1 << len(base_free)
    s_masks = [a_base | _mask_from_table(s, base_free) for s in range(n_s)]
    tot_v = b_sizes.copy()
    tot_e = b_edges.copy()
    choice = np.zeros((len(pieces), n_s), dtype=np.int64)
    for k, (pmask, free) in enumerate(zip(pieces, piece_free)):
        a_piece = A_mask & pmask
        t_sizes, t_edges = subset_table(G, a_piece, free)
        # cross edges between (a_piece + T) and the chosen base part
        members = [i for i in range(len(G)) if a_piece >> i & 1] + free
        base_nbrs = np.array([[(G.adj[x] >> b) & 1 for b in base_free] for x in members], dtype=np.int64)
        s_bits = ((np.arange(n_s)[:, None] >> np.arange(len(base_free))) & 1).astype(np.int64)
        per_vertex = s_bits @ base_nbrs.T  # (n_s, members): neighbours in free base part
        fixed = np.array([(G.adj[x] & a_base).bit_count() for x in members], dtype=np.int64)
        per_vertex += fixed
        n_a = a_piece.bit_count()
        t_idx = np.arange(1 << len(free))
        t_bits = ((t_idx[:, None] >> np.arange(len(free))) & 1).astype(np.int64)
        cross = per_vertex[:, :n_a].sum(axis=1)[:, None] + per_vertex[:, n_a:] @ t_bits.T
        e_tot = t_edges[None, :] + cross
        vals = t_sizes[None, :] - alpha.value * e_tot
        best = vals.argmin(axis=1)
        near = vals <= vals.min(axis=1, keepdims=True) + SCREEN_TOL
        for s in np.flatnonzero(near.sum(axis=1) > 1):
            cands = [
                (int(t_sizes[t]), int(e_tot[s, t]), _lex_key(_mask_from_table(int(t), free)), int(t))
                for t in np.flatnonzero(near[s])
            ]
            best[s] = _resolve(cands, alpha)[1]
        choice[k] = best
        tot_v += t_sizes[best]
        tot_e += e_tot[np.arange(n_s), best]
    totals = tot_v - alpha.value * tot_e

    def full_mask(s):
        m = s_masks[s]
        for k, free in enumerate(piece_free):
            m |= (A_mask & pieces[k]) | _mask_from_table(int(choice[k, s]), free)
        return m

    cands = []
    for s in _near_min(totals):
        m = full_mask(int(s))
        cands.append((int(tot_v[s]), int(tot_e[s]), _lex_key(m), m))
    return _resolve(cands, alpha)[::-1]


class _Dinic:
    """Dinic's max flow with capacities ``cx + cy*alpha`` kept as integer pairs."""

    def __init__(self, n: int, alpha: Alpha):
        self.n = n
        self.alpha = alpha
        self.af = alpha.value
        self.graph: list[list[int]] = [[] for _ in range(n)]
        self.to: list[int] = []
        self.cx: list[int] = []
        self.cy: list[int] = []

    def add(self, u: int, v: int, x: int, y: int) -> None:
        self.graph[u].append(len(self.to))
        self.to.append(v)
        self.cx.append(x)
        self.cy.append(y)
        self.graph[v].append(len(self.to))
        self.to.append(u)
        self.cx.append(0)
        self.cy.append(0)

    def _sign(self, x: int, y: int) -> int:
        f = x + y * self.af
        if abs(f) > 1e-9 * (1 + abs(x) + abs(y)):
            return 1 if f > 0 else -1
        return DeltaValue(x, -y, self.alpha).sign()

    def _positive(self, e: int) -> bool:
        return self._sign(self.cx[e], self.cy[e]) > 0

    def _bfs(self, s: int, t: int):
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.graph[u]:
                v = self.to[e]
                if level[v] < 0 and self._positive(e):
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, s: int, t: int, level, it) -> tuple[int, int] | None:
        """Find one augmenting path in the level graph and push its bottleneck."""
        path = []
        u = s
        while u != t:
            advanced = False
            while it[u] < len(self.graph[u]):
                e = self.graph[u][it[u]]
                v = self.to[e]
                if level[v] == level[u] + 1 and self._positive(e):
                    path.append(e)
                    u = v
                    advanced = True
                    break
                it[u] += 1
            if not advanced:
                if u == s:
                    return None
                level[u] = -1  # dead end
                e = path.pop()
                u = self.to[e ^ 1]
                it[u] += 1
        bx, by = self.cx[path[0]], self.cy[path[0]]
        for e in path[1:]:
            if self._sign(self.cx[e] - bx, self.cy[e] - by) < 0:
                bx, by = self.cx[e], self.cy[e]
        for e in path:
            self.cx[e] -= bx
            self.cy[e] -= by
            self.cx[e ^ 1] += bx
            self.cy[e ^ 1] += by
        return bx, by

    def max_flow(self, s: int, t: int) -> None:
        while True:
            level = self._bfs(s, t)
            if level is None:
                return
            it = [0] * self.n
            while self._dfs(s, t, level, it) is not None:
                pass

    def reachable(self, s: int) -> set[int]:
        seen = {s}
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.graph[u]:
                v = self.to[e]
                if v not in seen and self._positive(e):
                    seen.add(v)
                    q.append(v)
        return seen


def mincut_min(G: Graph, A_mask: int, alpha: Alpha) -> tuple[int, DeltaValue]:
    n = len(G)
    free = [i for i in range(n) if not A_mask >> i & 1]
    pos = {v: k for k, v in enumerate(free)}
    free_edges = [(i, j) for i, j in G._edges if i in pos and j in pos]
    s = len(free) + len(free_edges)
    t = s + 1
    net = _Dinic(t + 1, alpha)
    # infinity exceeds the sum of all source capacities
    inf_x, inf_y = 1 + n, 1 + G.n_edges()
    for k, v in enumerate(free):
        deg_a = (G.adj[v] & A_mask).bit_count()
        sign = net._sign(-1, deg_a)
        if sign > 0:
            net.add(s, k, -1, deg_a)
        elif sign < 0:
            net.add(k, t, 1, -deg_a)
    for k, (i, j) in enumerate(free_edges):
        node = len(free) + k
        net.add(s, node, 0, 1)
        net.add(node, pos[i], inf_x, inf_y)
        net.add(node, pos[j], inf_x, inf_y)
    net.max_flow(s, t)
    side = net.reachable(s)
    m = A_mask
    for k, v in enumerate(free):
        if k in side:
            m |= 1 << v
    return m, DeltaValue(m.bit_count(), G.edges_in_mask(m), alpha)


ENGINES = {"brute": brute_min, "pieces": pieces_min, "mincut": mincut_min}


def choose_engine(G: Graph, A_mask: int) -> str:
    free = len(G) - A_mask.bit_count()
    if free <= BRUTE_LIMIT:
        return "brute"
    dec = G.decomposition
    if dec is not None:
        base_free = len(set(dec.base) - G.labels(A_mask))
        widest = max((len(set(p) - G.labels(A_mask)) for p in dec.pieces), default=0)
        if base_free <= PIECES_BASE_LIMIT and base_free + widest <= PIECES_LIMIT:
            return "pieces"
    return "mincut"


def min_delta_mask(G: Graph, A_mask: int, alpha: Alpha, engine: str = "auto") -> tuple[int, DeltaValue, str]:
    if engine == "auto":
        engine = choose_engine(G, A_mask)
    if engine not in ENGINES:
        raise InvalidInput(f"unknown engine {engine!r}")
    m, val = ENGINES[engine](G, A_mask, alpha)
    return m, val, engine
