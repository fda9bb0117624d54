"""Immutable graphs, BFS machinery, strong products, fans, blowups and
the bandwidth / local-density measures.

Vertices are dense integers ``0..n-1``.  Removing vertices never re-indexes:
a deleted set is carried as a mask so that downstream artifacts (orderings,
certificates) always refer to original ids.  Distances are non-negative
integers with ``math.inf`` as the unreachable sentinel, which absorbs
correctly under ``max`` and ``+``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import InputError

INF = math.inf


class Graph:
    """Undirected simple graph on vertices ``0..n-1`` with an optional
    deleted-vertex mask.

    Instances are immutable; ``delete`` returns a new view sharing the
    adjacency structure.
    """

    __slots__ = ("n", "_adj", "removed")

    def __init__(self, n: int, edges, removed=frozenset()):
        if n < 0:
            raise InputError("vertex count must be non-negative")
        adj: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise InputError(f"edge ({u},{v}) has endpoint outside 0..{n - 1}")
            if u == v:
                raise InputError(f"self-loop at vertex {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise InputError(f"duplicate edge ({key[0]},{key[1]})")
            seen.add(key)
            adj[u].append(v)
            adj[v].append(u)
        self.n = n
        self._adj = tuple(tuple(sorted(nbrs)) for nbrs in adj)
        self.removed = frozenset(removed)
        for v in self.removed:
            if not (0 <= v < n):
                raise InputError(f"removed vertex {v} outside 0..{n - 1}")

    @classmethod
    def _from_parts(cls, n, adj, removed):
        g = object.__new__(cls)
        g.n = n
        g._adj = adj
        g.removed = removed
        return g

    # -- basic queries ----------------------------------------------------

    def vertices(self):
        removed = self.removed
        return [v for v in range(self.n) if v not in removed]

    @property
    def num_vertices(self) -> int:
        return self.n - len(self.removed)

    def neighbors(self, v: int):
        """Live neighbors of a live vertex ``v``."""
        self._check_vertex(v)
        removed = self.removed
        if not removed:
            return self._adj[v]
        return tuple(w for w in self._adj[v] if w not in removed)

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def edges(self):
        removed = self.removed
        out = []
        for u in range(self.n):
            if u in removed:
                continue
            for v in self._adj[u]:
                if v > u and v not in removed:
                    out.append((u, v))
        return out

    @property
    def num_edges(self) -> int:
        return len(self.edges())

    def has_edge(self, u: int, v: int) -> bool:
        if u in self.removed or v in self.removed:
            return False
        return v in self._adj[u]

    def delete(self, xs) -> "Graph":
        """Masked view of this graph with ``xs`` removed (ids preserved)."""
        return Graph._from_parts(self.n, self._adj, self.removed | frozenset(xs))

    def _check_vertex(self, v):
        if not isinstance(v, int) or not (0 <= v < self.n) or v in self.removed:
            raise InputError(f"invalid vertex id {v!r}")

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by minimum id."""
        seen = set(self.removed)
        comps = []
        for s in range(self.n):
            if s in seen:
                continue
            comp = []
            queue = deque([s])
            seen.add(s)
            while queue:
                u = queue.popleft()
                comp.append(u)
                for w in self._adj[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges}, removed={len(self.removed)})"


@dataclass(frozen=True)
class ProductVertex:
    """Vertex of a strong product of a host graph and a path: a host vertex
    ``h`` plus an integer row index ``p``."""

    h: int
    p: int


@dataclass(frozen=True)
class Layering:
    """Map vertex -> integer layer with adjacent vertices at most one layer
    apart."""

    layer_of: dict

    def validate(self, g: Graph):
        for v in g.vertices():
            if v not in self.layer_of:
                raise InputError(f"vertex {v} has no layer")
        for u, v in g.edges():
            if abs(self.layer_of[u] - self.layer_of[v]) > 1:
                raise InputError(f"edge ({u},{v}) spans more than one layer")

    def normalized(self) -> "Layering":
        """Shift layers so the minimum is 0."""
        if not self.layer_of:
            return self
        lo = min(self.layer_of.values())
        return Layering({v: s - lo for v, s in self.layer_of.items()})


def bfs_distances(g: Graph, source: int) -> dict:
    """Exact hop distances from ``source``; unreachable vertices map to inf."""
    g._check_vertex(source)
    dist = {v: INF for v in g.vertices()}
    dist[source] = 0
    removed = g.removed
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for w in g._adj[u]:
            if w not in removed and dist[w] is INF:
                dist[w] = du
                queue.append(w)
    return dist


def all_pairs_distances(g: Graph) -> dict:
    """BFS from every live vertex; returns ``{v: {w: d}}``."""
    return {v: bfs_distances(g, v) for v in g.vertices()}


def product_distance(dh, dp):
    """Distance in a strong product: the max of the factor distances."""
    if dh < 0 or dp < 0:
        raise InputError("factor distances must be non-negative")
    return max(dh, dp)


def build_fan(path_len: int) -> Graph:
    """Fan graph: a path on vertices ``0..path_len-1`` plus a center vertex
    ``path_len`` adjacent to every path vertex."""
    if path_len < 1:
        raise InputError("fan needs a path of at least one vertex")
    edges = [(i, i + 1) for i in range(path_len - 1)]
    edges += [(i, path_len) for i in range(path_len)]
    return Graph(path_len + 1, edges)


def build_blowup(h: Graph, b: int):
    """Replace each vertex of ``h`` by a b-clique and each edge by a complete
    bipartite join.

    Returns ``(graph, slot_of)`` where ``slot_of[(v, s)]`` is the blowup vertex
    for slot ``s`` of host vertex ``v``.
    """
    if b < 1:
        raise InputError("blowup factor must be at least 1")
    if h.removed:
        raise InputError("blowup host must not have removed vertices")
    slot_of = {}
    for v in range(h.n):
        for s in range(b):
            slot_of[(v, s)] = v * b + s
    edges = []
    for v in range(h.n):
        for s in range(b):
            for t in range(s + 1, b):
                edges.append((v * b + s, v * b + t))
    for u, v in h.edges():
        for s in range(b):
            for t in range(b):
                edges.append((u * b + s, v * b + t))
    return Graph(h.n * b, edges), slot_of


def strong_product(a: Graph, b: Graph):
    """Materialized strong product of two (mask-free) graphs.

    Returns ``(graph, index_of)`` with ``index_of[(va, vb)] = va * b.n + vb``.
    Intended for desk-scale oracles; quadratic in the factor sizes.
    """
    if a.removed or b.removed:
        raise InputError("strong product factors must not have removed vertices")
    index_of = {(va, vb): va * b.n + vb for va in range(a.n) for vb in range(b.n)}
    edges = []
    for va in range(a.n):
        for vb in range(b.n):
            base = va * b.n + vb
            for wb in b._adj[vb]:
                if wb > vb:
                    edges.append((base, va * b.n + wb))
            for wa in a._adj[va]:
                if wa > va:
                    edges.append((base, wa * b.n + vb))
                    for wb in b._adj[vb]:
                        edges.append((base, wa * b.n + wb))
    return Graph(a.n * b.n, edges), index_of


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def grid_graph(rows: int, cols: int):
    """Grid graph plus the ``(r, c) -> id`` map (row-major ids)."""
    idx = {(r, c): r * cols + c for r in range(rows) for c in range(cols)}
    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((idx[(r, c)], idx[(r, c + 1)]))
            if r + 1 < rows:
                edges.append((idx[(r, c)], idx[(r + 1, c)]))
    return Graph(rows * cols, edges), idx


def bfs_layering(g: Graph, root: int) -> Layering:
    """BFS layering from ``root``; other components get fresh lowest-id roots
    and restart at layer 0."""
    g._check_vertex(root)
    layer = {}
    order = [root] + [v for v in g.vertices() if v != root]
    for s in order:
        if s in layer:
            continue
        dist = bfs_distances(g, s)
        for v, d in dist.items():
            if d is not INF and v not in layer:
                layer[v] = d
    return Layering(layer)


def bandwidth_of_ordering(g: Graph, ordering) -> int:
    """Maximum index gap across an edge of ``g`` under ``ordering``."""
    live = g.vertices()
    if sorted(ordering) != live:
        raise InputError("ordering is not a permutation of the live vertex set")
    pos = {v: i for i, v in enumerate(ordering)}
    width = 0
    for u, v in g.edges():
        gap = abs(pos[u] - pos[v])
        if gap > width:
            width = gap
    return width


def graph_local_density(g: Graph) -> Fraction:
    """Exact local density: max over vertices v and realized radii r of
    ``(|B(v, r)| - 1) / r``.

    The maximum over real radii is attained at a realized distance, so only
    the distinct finite BFS distances from each source are scanned.
    """
    live = g.vertices()
    if not live:
        raise InputError("local density of an empty graph is undefined")
    best = Fraction(0)
    for v in live:
        dist = bfs_distances(g, v)
        finite = sorted(d for d in dist.values() if d is not INF)
        # finite is sorted, so |B(v, r)| is the index past the last d <= r
        count = 0
        total = len(finite)
        i = 0
        while i < total:
            r = finite[i]
            while i < total and finite[i] == r:
                i += 1
            count = i
            if r > 0:
                ratio = Fraction(count - 1, r)
                if ratio > best:
                    best = ratio
    return best
