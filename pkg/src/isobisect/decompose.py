"""Edge partitions of cubic graphs into two linear forests with short paths."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels
from .graph import Graph

Edge = tuple[int, int]

DEFAULT_L1 = 5
DEFAULT_L2 = 5


class SearchBudgetExceeded(RuntimeError):
    """Exact search stopped before deciding existence."""


def _norm(e) -> Edge:
    u, w = int(e[0]), int(e[1])
    return (u, w) if u < w else (w, u)


@dataclass(frozen=True)
class LinearForestPair:
    """Edges split into forest F1 (index 0) and forest F2 (index 1)."""

    n: int
    f1: tuple[Edge, ...]
    f2: tuple[Edge, ...]
    l1: int = DEFAULT_L1
    l2: int = DEFAULT_L2

    @classmethod
    def from_assignment(cls, g: Graph, assignment, l1=DEFAULT_L1, l2=DEFAULT_L2):
        """``assignment[i]`` is 0 or 1 for edge ``g.edges[i]``."""
        f1 = tuple(e for e, a in zip(g.edges, assignment) if a == 0)
        f2 = tuple(e for e, a in zip(g.edges, assignment) if a == 1)
        return cls(g.n, f1, f2, l1, l2)

    def forest(self, which: int) -> tuple[Edge, ...]:
        return self.f1 if which == 0 else self.f2

    def bound(self, which: int) -> int:
        return self.l1 if which == 0 else self.l2

    @cached_property
    def _paths(self) -> tuple[list[list[int]], list[list[int]]]:
        return _forest_paths(self.n, self.f1), _forest_paths(self.n, self.f2)

    def paths_of(self, which: int) -> list[list[int]]:
        """Maximal paths of a forest (isolated vertices are length-0 paths).

        Each path starts at its smaller endpoint; the list is sorted by first
        vertex.
        """
        return self._paths[which]

    def max_len(self, which: int) -> int:
        return max((len(p) - 1 for p in self.paths_of(which)), default=0)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "l1": self.l1,
            "l2": self.l2,
            "forests": [
                {
                    "edges": [list(e) for e in self.forest(k)],
                    "paths": self.paths_of(k),
                    "max_len": self.max_len(k),
                }
                for k in (0, 1)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> LinearForestPair:
        f1, f2 = (tuple(_norm(e) for e in data["forests"][k]["edges"]) for k in (0, 1))
        return cls(data["n"], f1, f2, data.get("l1", DEFAULT_L1), data.get("l2", DEFAULT_L2))


def _forest_paths(n: int, edges) -> list[list[int]]:
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, w in edges:
        nbrs[u].append(w)
        nbrs[w].append(u)
    seen = [False] * n
    paths = []
    for s in range(n):
        if seen[s] or len(nbrs[s]) > 1:
            continue
        path = [s]
        seen[s] = True
        prev, v = -1, s
        while True:
            nxt = [w for w in nbrs[v] if w != prev]
            if not nxt:
                break
            prev, v = v, nxt[0]
            seen[v] = True
            path.append(v)
        if path[-1] < path[0]:
            path.reverse()
        paths.append(path)
    paths.sort(key=lambda p: p[0])
    return paths


def validate(g: Graph, pair: LinearForestPair, l1: int | None = None, l2: int | None = None) -> str | None:
    """None if ``pair`` is a valid decomposition of ``g``, else the first violation."""
    l1 = pair.l1 if l1 is None else l1
    l2 = pair.l2 if l2 is None else l2
    if pair.n != g.n:
        return f"partition: pair has {pair.n} vertices, graph has {g.n}"
    s1, s2 = set(map(_norm, pair.f1)), set(map(_norm, pair.f2))
    if len(s1) != len(pair.f1) or len(s2) != len(pair.f2):
        return "partition: an edge is listed twice within one forest"
    both = s1 & s2
    if both:
        return f"partition: edge {min(both)} is in both forests"
    everything = set(g.edges)
    extra = (s1 | s2) - everything
    if extra:
        return f"partition: {min(extra)} is not an edge of the graph"
    missing = everything - s1 - s2
    if missing:
        return f"partition: edge {min(missing)} is in neither forest"
    for k, edges, bound in ((0, s1, l1), (1, s2, l2)):
        name = f"F{k + 1}"
        deg = [0] * g.n
        for u, w in edges:
            deg[u] += 1
            deg[w] += 1
        over = [v for v in range(g.n) if deg[v] > 2]
        if over:
            return f"forest: {name} has degree {deg[over[0]]} at vertex {over[0]}"
        covered = sum(len(p) for p in _forest_paths(g.n, edges))
        if covered != g.n:
            return f"forest: {name} contains a cycle"
        for p in _forest_paths(g.n, edges):
            if len(p) - 1 > bound:
                return f"length: {name} path {p} has {len(p) - 1} edges > {bound}"
    return None


# ---------------------------------------------------------------------------
# exact search


def _bfs_edge_order(g: Graph) -> list[int]:
    order = []
    seen_e = set()
    seen_v = set()
    for s in range(g.n):
        if s in seen_v:
            continue
        seen_v.add(s)
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.adj[v]:
                e = g.edge_index[_norm((v, w))]
                if e not in seen_e:
                    seen_e.add(e)
                    order.append(e)
                if w not in seen_v:
                    seen_v.add(w)
                    queue.append(w)
    return order


def thomassen_decompose(g: Graph, l1: int = DEFAULT_L1, l2: int = DEFAULT_L2, budget: int = 2_000_000):
    """Exact backtracking for an F1/F2 split with path lengths <= l1, l2.

    Returns a pair, or None once the whole tree has been exhausted.
    Raises :class:`SearchBudgetExceeded` after ``budget`` search nodes.
    """
    if l1 < 1 or l2 < 1:
        raise ValueError("length bounds must be positive")
    edges = g.edges
    m = len(edges)
    order = _bfs_edge_order(g)
    lim = (l1, l2)
    colour = [-1] * m
    # per colour: neighbours along assigned edges
    nb = ([[] for _ in range(g.n)], [[] for _ in range(g.n)])
    nodes = 0

    def end_of(c, v):
        """Length and far end of the colour-c path that has v as an endpoint."""
        length, prev, cur = 0, -1, v
        while True:
            nxt = [w for w in nb[c][cur] if w != prev]
            if not nxt:
                return length, cur
            prev, cur = cur, nxt[0]
            length += 1

    def feasible(c, u, w):
        if len(nb[c][u]) >= 2 or len(nb[c][w]) >= 2:
            return False
        lu, eu = end_of(c, u)
        if eu == w:
            return False
        lw, _ = end_of(c, w)
        return lu + lw + 1 <= lim[c]

    def rec(i):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise SearchBudgetExceeded(f"exact search exceeded {budget} nodes")
        if i == m:
            return True
        e = order[i]
        u, w = edges[e]
        choices = (0,) if (i == 0 and l1 == l2) else (0, 1)
        for c in choices:
            if feasible(c, u, w):
                colour[e] = c
                nb[c][u].append(w)
                nb[c][w].append(u)
                if rec(i + 1):
                    return True
                nb[c][u].pop()
                nb[c][w].pop()
                colour[e] = -1
        return False

    if not rec(0):
        return None
    return LinearForestPair.from_assignment(g, colour, l1, l2)


# ---------------------------------------------------------------------------
# heuristic


def _incidence(g: Graph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    eu = np.array([e[0] for e in g.edges], dtype=np.int32)
    ev = np.array([e[1] for e in g.edges], dtype=np.int32)
    inc = np.full((g.n, 3), -1, dtype=np.int32)
    fill = [0] * g.n
    for i, (u, w) in enumerate(g.edges):
        inc[u, fill[u]] = i
        fill[u] += 1
        inc[w, fill[w]] = i
        fill[w] += 1
    return eu, ev, inc


def heuristic_decompose(
    g: Graph,
    l1: int = DEFAULT_L1,
    l2: int = DEFAULT_L2,
    seed: int = 0,
    restarts: int = 4,
    max_steps: int | None = None,
    relax_l1: int = 8,
) -> LinearForestPair | None:
    """Randomised local search; relaxes l1 up to ``l1 + relax_l1`` if stuck.

    Only F2's bound matters downstream, so F1 is the one given up on.
    """
    if any(len(a) != 3 for a in g.adj):
        raise ValueError("heuristic decomposition needs a cubic graph")
    eu, ev, inc = _incidence(g)
    steps = max_steps if max_steps is not None else 200 * g.n + 10_000
    for bound1 in range(l1, l1 + relax_l1 + 1):
        for attempt in range(restarts):
            s = (seed * 1_000_003 + attempt * 7919 + bound1) & 0xFFFFFFFFFFFFFFFF
            colour, cost, _ = kernels.decompose_search(eu, ev, inc, bound1, l2, s, steps)
            if cost == 0:
                pair = LinearForestPair.from_assignment(g, colour.tolist(), bound1, l2)
                problem = validate(g, pair)
                if problem is not None:  # kernel bug; never hand back an invalid pair
                    raise AssertionError(problem)
                return pair
    return None


def circular_ladder_pair(m: int) -> LinearForestPair:
    """Explicit decomposition of CL_m (m even) with all paths of length <= 3.

    Rung i and the two cycle edges from position i to i+1 all go to forest
    ``i mod 2``.
    """
    from .fixtures import circular_ladder

    if m % 2:
        raise ValueError("pattern needs an even number of rungs")
    g = circular_ladder(m)
    assignment = []
    for u, w in g.edges:
        if w == u + m:
            i = u
        else:
            a, b = u % m, w % m
            i = a if (a + 1) % m == b else b
        assignment.append(i % 2)
    return LinearForestPair.from_assignment(g, assignment, 3, 3)
