"""Bundled test graphs.

``cubic_<n>.g6`` hold every connected cubic graph on n vertices (generated
once with nauty's ``geng -c -d3 -D3``); ``named.g6`` holds the classical
named graphs.
"""
from __future__ import annotations

from functools import cache
from importlib import resources

from .graph import CubicGraph, Graph
from .graph6 import parse_graph6

CUBIC_COUNTS = {4: 1, 6: 2, 8: 5, 10: 19, 12: 85, 14: 509, 16: 4060}


def _data_lines(name: str) -> list[str]:
    text = (resources.files("isobisect") / "data" / name).read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip()]


@cache
def named_graph6() -> dict[str, str]:
    out = {}
    for line in _data_lines("named.g6"):
        key, code = line.split()
        out[key] = code
    return out


def named(name: str) -> CubicGraph:
    """One of k4, k33, prism, petersen, heawood, mcgee, foster, tutte_coxeter."""
    try:
        code = named_graph6()[name]
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; have {sorted(named_graph6())}") from None
    return parse_graph6(code, cubic=True)


def k4() -> CubicGraph:
    return named("k4")


def circular_ladder(m: int) -> CubicGraph:
    """CL_m: two m-cycles ``0..m-1`` and ``m..2m-1`` joined by rungs ``i ~ i+m``."""
    if m < 3:
        raise ValueError("circular ladder needs m >= 3")
    edges = []
    for i in range(m):
        j = (i + 1) % m
        edges.append((i, j))
        edges.append((m + i, m + j))
        edges.append((i, m + i))
    return CubicGraph(Graph.from_edges(2 * m, edges).adj)


def cubic_graph_lines(n: int) -> list[str]:
    if n not in CUBIC_COUNTS:
        raise ValueError(f"no bundled enumeration for n={n}")
    return _data_lines(f"cubic_{n}.g6")


def cubic_graphs(n: int) -> list[CubicGraph]:
    """All connected cubic graphs on ``n`` vertices, up to isomorphism."""
    return [parse_graph6(line, cubic=True) for line in cubic_graph_lines(n)]


def brick_torus(w: int, h: int) -> CubicGraph:
    """Honeycomb on a torus drawn as a brick wall.

    Vertex ``(x, y)`` is ``y * w + x``. Rows are w-cycles; (x, y) also joins
    (x, y+1) when x + y is even. Girth 6 once w, h >= 6; both must be even.
    """
    if w % 2 or h % 2 or w < 4 or h < 4:
        raise ValueError("brick torus needs even w, h >= 4")
    edges = []
    for y in range(h):
        for x in range(w):
            v = y * w + x
            edges.append((v, y * w + (x + 1) % w))
            if (x + y) % 2 == 0:
                edges.append((v, ((y + 1) % h) * w + x))
    return CubicGraph(Graph.from_edges(w * h, edges).adj)


def complete_to_cubic(n: int, edges) -> tuple[CubicGraph, int]:
    """Pad a subcubic graph to a cubic one; returns the graph and the core size.

    Every missing half-edge gets its own pendant gadget: K4 minus an edge,
    with that edge subdivided by a new vertex that takes the half-edge.
    Gadgets hang off a single vertex, so distances inside the core are
    unchanged.
    """
    core = Graph.from_edges(n, edges)
    out = list(core.edges)
    nxt = n
    for v in range(n):
        for _ in range(3 - core.degree(v)):
            s, a, b, c, d = range(nxt, nxt + 5)
            nxt += 5
            out += [(v, s), (s, a), (s, b), (a, c), (a, d), (b, c), (b, d), (c, d)]
    return CubicGraph(Graph.from_edges(nxt, out).adj), n
