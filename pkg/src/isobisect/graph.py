"""Immutable subcubic graphs and the metric queries used everywhere else.

Vertices are ``0..n-1`` and every adjacency list is sorted, so BFS orders and
tie-breaks are reproducible run to run.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SMALL_GRAPH_LIMIT = 64


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph with maximum degree 3."""

    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.adj)
        for v, nbrs in enumerate(self.adj):
            if len(nbrs) > 3:
                raise GraphError(f"vertex {v} has degree {len(nbrs)} > 3")
            if len(set(nbrs)) != len(nbrs):
                raise GraphError(f"multi-edge at vertex {v}")
            for w in nbrs:
                if w == v:
                    raise GraphError(f"loop at vertex {v}")
                if not 0 <= w < n:
                    raise GraphError(f"vertex {v} has neighbour {w} out of range")
                if v not in self.adj[w]:
                    raise GraphError(f"edge {v}-{w} is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]):
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, w in edges:
            if u == w:
                raise GraphError(f"loop at vertex {u}")
            if w in nbrs[u]:
                raise GraphError(f"duplicate edge {u}-{w}")
            nbrs[u].add(w)
            nbrs[w].add(u)
        return cls(tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def from_adjacency(cls, adj: Sequence[Iterable[int]]):
        return cls(tuple(tuple(sorted(a)) for a in adj))

    @property
    def n(self) -> int:
        return len(self.adj)

    @cached_property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        """Edges ``(u, w)`` with ``u < w`` in lexicographic order."""
        return tuple((u, w) for u in range(self.n) for w in self.adj[u] if u < w)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @cached_property
    def adj_array(self) -> np.ndarray:
        """``(n, 3)`` int32 neighbour table padded with -1, for the kernels."""
        out = np.full((self.n, 3), -1, dtype=np.int32)
        for v, nbrs in enumerate(self.adj):
            out[v, : len(nbrs)] = nbrs
        return out

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, w: int) -> bool:
        return w in self.adj[u]

    def neighbours(self, v: int) -> tuple[int, ...]:
        return self.adj[v]

    def induced(self, vertices: Iterable[int]) -> tuple[Graph, list[int]]:
        """Induced subgraph relabelled ``0..k-1`` in sorted order of ``vertices``.

        Returns the subgraph and the list mapping new labels to old ones.
        """
        verts = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(verts)}
        adj = tuple(
            tuple(sorted(pos[w] for w in self.adj[v] if w in pos)) for v in verts
        )
        return Graph(adj), verts

    def to_dot(self, colouring: Sequence[int] | None = None, name: str = "G") -> str:
        lines = [f"graph {name} {{"]
        if colouring is not None:
            for v in range(self.n):
                fill = "red" if colouring[v] == 0 else "lightblue"
                lines.append(f'  {v} [style=filled, fillcolor="{fill}"];')
        for u, w in self.edges:
            lines.append(f"  {u} -- {w};")
        lines.append("}")
        return "\n".join(lines) + "\n"


class CubicGraph(Graph):
    """3-regular simple graph."""

    def __post_init__(self):
        super().__post_init__()
        if self.n < 4 or self.n % 2:
            raise GraphError(f"a cubic graph needs an even number >= 4 of vertices, got {self.n}")
        for v, nbrs in enumerate(self.adj):
            if len(nbrs) != 3:
                raise GraphError(f"vertex {v} has degree {len(nbrs)}, expected 3")


class SmallGraph(Graph):
    """Subcubic graph small enough for exact canonical forms."""

    def __post_init__(self):
        if len(self.adj) > SMALL_GRAPH_LIMIT:
            raise GraphError(f"{len(self.adj)} vertices exceeds the small-graph limit {SMALL_GRAPH_LIMIT}")
        super().__post_init__()


def as_cubic(g: Graph) -> CubicGraph:
    return g if isinstance(g, CubicGraph) else CubicGraph(g.adj)


# ---------------------------------------------------------------------------
# distances


def bfs_distances(g: Graph, sources: Iterable[int], limit: int | None = None) -> dict[int, int]:
    """Distances from a source set, truncated at ``limit`` when given.

    The returned dict iterates in BFS order.
    """
    dist: dict[int, int] = {}
    queue: deque[int] = deque()
    for s in sorted(set(sources)):
        dist[s] = 0
        queue.append(s)
    while queue:
        v = queue.popleft()
        d = dist[v]
        if limit is not None and d >= limit:
            continue
        for w in g.adj[v]:
            if w not in dist:
                dist[w] = d + 1
                queue.append(w)
    return dist


def distance(g: Graph, u: int, w: int) -> int | None:
    if u == w:
        return 0
    return bfs_distances(g, [u]).get(w)


def ball_of_set(g: Graph, xs: Iterable[int], d: int) -> list[int]:
    """Vertices within distance ``d`` of the set, in BFS order."""
    if d < 0:
        raise ValueError("radius must be non-negative")
    return list(bfs_distances(g, xs, limit=d))


def ball(g: Graph, v: int, d: int) -> list[int]:
    return ball_of_set(g, [v], d)


def sphere(g: Graph, xs: Iterable[int], d: int) -> list[int]:
    """Vertices at distance exactly ``d`` from the set, sorted."""
    xs = list(xs)
    if not xs:
        raise ValueError("sphere needs a nonempty centre set")
    dist = bfs_distances(g, xs, limit=d)
    return sorted(v for v, k in dist.items() if k == d)


def eccentricity(g: Graph, v: int) -> int:
    return max(bfs_distances(g, [v]).values())


def diameter(g: Graph) -> int:
    if not is_connected(g):
        raise GraphError("diameter of a disconnected graph")
    return max(eccentricity(g, v) for v in range(g.n))


def geodesic(g: Graph, u: int, w: int) -> list[int]:
    """Lexicographically smallest shortest path from ``u`` to ``w``."""
    dist_w = bfs_distances(g, [w])
    if u not in dist_w:
        raise GraphError(f"{u} and {w} are not connected")
    path = [u]
    v = u
    while v != w:
        # smallest neighbour one step closer to w
        v = min(x for x in g.adj[v] if dist_w.get(x) == dist_w[v] - 1)
        path.append(v)
    return path


def find_geodesic_of_length(g: Graph, v: int, length: int, within: int | None = None) -> list[int] | None:
    """A geodesic of ``length`` edges starting at ``v``, or None.

    The far endpoint is the smallest vertex at distance exactly ``length``;
    ``within`` caps how far from ``v`` the path may reach (it must be at
    least ``length`` for any result).
    """
    if within is not None and within < length:
        return None
    dist = bfs_distances(g, [v], limit=length)
    ends = sorted(x for x, k in dist.items() if k == length)
    if not ends:
        return None
    return geodesic(g, v, ends[0])


def is_geodesic(g: Graph, path: Sequence[int]) -> bool:
    if len(path) < 1:
        return False
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            return False
    return distance(g, path[0], path[-1]) == len(path) - 1


def is_induced_path(g: Graph, path: Sequence[int]) -> bool:
    if len(set(path)) != len(path):
        return False
    pos = {v: i for i, v in enumerate(path)}
    for i, v in enumerate(path):
        for w in g.adj[v]:
            j = pos.get(w)
            if j is not None and abs(i - j) != 1:
                return False
    return all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def girth(g: Graph) -> int | None:
    """Length of a shortest cycle (None for forests)."""
    best = None
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            if best is not None and 2 * dist[v] >= best:
                break
            for w in g.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    parent[w] = v
                    queue.append(w)
                elif parent[v] != w:
                    cyc = dist[v] + dist[w] + 1
                    if best is None or cyc < best:
                        best = cyc
    return best


def connected_components(g: Graph, vertices: Iterable[int] | None = None) -> list[list[int]]:
    """Components of the subgraph induced by ``vertices`` (all by default).

    Each component is sorted; components are ordered by smallest vertex.
    """
    if vertices is None:
        allowed = None
        order = range(g.n)
    else:
        allowed = set(vertices)
        order = sorted(allowed)
    seen: set[int] = set()
    comps = []
    for s in order:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.adj[v]:
                if w not in seen and (allowed is None or w in allowed):
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n == 0 or len(connected_components(g)) == 1


def is_isomorphism(g: Graph, h: Graph, mapping: dict[int, int], domain: Iterable[int]) -> bool:
    """Check that ``mapping`` restricted to ``domain`` is an isomorphism of induced subgraphs."""
    dom = set(domain)
    img = {mapping[v] for v in dom}
    if len(img) != len(dom):
        return False
    for v in dom:
        mine = {mapping[w] for w in g.adj[v] if w in dom}
        theirs = {w for w in h.adj[mapping[v]] if w in img}
        if mine != theirs:
            return False
    return True
