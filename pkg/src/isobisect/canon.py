"""Exact canonical forms for small subcubic graphs.

Colour refinement splits the vertex set into an equitable ordered partition;
the search then individualises vertices of the first smallest non-singleton
cell, refines again, and keeps the lexicographically smallest adjacency
certificate over all leaves. Automorphisms found on the way (two leaves with
equal certificates) prune sibling branches lying in one orbit of the
pointwise stabiliser of the current prefix.
"""
from __future__ import annotations

from collections.abc import Sequence
from functools import cache
from typing import NewType

from .graph import SMALL_GRAPH_LIMIT, Graph, GraphError
from .graph6 import encode_graph6

CanonicalForm = NewType("CanonicalForm", bytes)


class CanonLimitError(GraphError):
    pass


def _refine(adj, cells: list[list[int]]) -> list[list[int]]:
    """Refine an ordered partition until equitable; cell order stays canonical."""
    n = len(adj)
    cell_of = [0] * n
    while True:
        for i, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = i
        new_cells: list[list[int]] = []
        for cell in cells:
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            keyed = sorted(cell, key=lambda v: sorted(cell_of[w] for w in adj[v]))
            prev = None
            for v in keyed:
                k = sorted(cell_of[w] for w in adj[v])
                if k != prev:
                    new_cells.append([])
                    prev = k
                new_cells[-1].append(v)
        if len(new_cells) == len(cells):
            return new_cells
        cells = new_cells


def _find(parent: dict[int, int], x: int) -> int:
    while parent.get(x, x) != x:
        parent[x] = parent.get(parent[x], parent[x])
        x = parent[x]
    return x


class _Search:
    def __init__(self, adj, colours):
        self.adj = adj
        self.colours = colours
        self.best_cert = None
        self.best_order: list[int] | None = None
        self.automorphisms: list[list[int]] = []

    def certificate(self, order: list[int]):
        pos = [0] * len(order)
        for i, v in enumerate(order):
            pos[v] = i
        return tuple(tuple(sorted(pos[w] for w in self.adj[v])) for v in order)

    def leaf(self, cells):
        order = [c[0] for c in cells]
        cert = self.certificate(order)
        if self.best_cert is None or cert < self.best_cert:
            self.best_cert = cert
            self.best_order = order
        elif cert == self.best_cert:
            gamma = [0] * len(order)
            for a, b in zip(self.best_order, order):
                gamma[a] = b
            self.automorphisms.append(gamma)

    def run(self, cells, prefix: list[int]):
        if len(cells) == len(self.adj):
            self.leaf(cells)
            return
        size = min(len(c) for c in cells if len(c) > 1)
        idx = next(i for i, c in enumerate(cells) if len(c) == size)
        target = sorted(cells[idx])
        tried_roots: set[int] = set()
        for v in target:
            # orbits of automorphisms fixing the prefix pointwise
            parent: dict[int, int] = {}
            for gamma in self.automorphisms:
                if all(gamma[p] == p for p in prefix):
                    for a in target:
                        ra, rb = _find(parent, a), _find(parent, gamma[a])
                        if ra != rb:
                            parent[max(ra, rb)] = min(ra, rb)
            root = _find(parent, v)
            if any(_find(parent, u) == root for u in tried_roots):
                continue
            tried_roots.add(v)
            rest = [u for u in cells[idx] if u != v]
            child = cells[:idx] + [[v], rest] + cells[idx + 1 :]
            self.run(_refine(self.adj, child), prefix + [v])


def canonical_labeling(h: Graph, colours: Sequence[int] | None = None) -> tuple[CanonicalForm, list[int]]:
    """Canonical form and the canonical order (``order[i]`` = vertex at position i).

    With ``colours`` the form is that of the vertex-coloured graph: two
    coloured graphs get equal forms iff a colour-preserving isomorphism
    exists, and composing the two orders gives one.
    """
    n = h.n
    if n > SMALL_GRAPH_LIMIT:
        raise CanonLimitError(f"{n} vertices exceeds the canonical-form limit {SMALL_GRAPH_LIMIT}")
    adj = h.adj
    if n == 0:
        return CanonicalForm(b"?"), []
    cols = tuple(colours) if colours is not None else (0,) * n
    keys = sorted({(cols[v], len(adj[v])) for v in range(n)})
    cells = [[v for v in range(n) if (cols[v], len(adj[v])) == k] for k in keys]
    search = _Search(adj, cols)
    search.run(_refine(adj, cells), [])
    order = search.best_order
    relabelled = Graph(tuple(tuple(sorted(w for w in c)) for c in search.best_cert))
    form = encode_graph6(relabelled).encode("ascii")
    if colours is not None:
        form += b"|" + bytes(48 + cols[v] for v in order)
    return CanonicalForm(form), order


def canonical_form(h: Graph, colours: Sequence[int] | None = None) -> CanonicalForm:
    return canonical_labeling(h, colours)[0]


@cache
def path_form(k: int) -> CanonicalForm:
    """Canonical form of the path on ``k`` vertices."""
    return canonical_form(Graph.from_edges(k, [(i, i + 1) for i in range(k - 1)]))


@cache
def cycle_form(k: int) -> CanonicalForm:
    return canonical_form(Graph.from_edges(k, [(i, (i + 1) % k) for i in range(k)]))


@cache
def _path_lengths() -> dict[bytes, int]:
    return {path_form(k): k for k in range(1, SMALL_GRAPH_LIMIT + 1)}


def path_order(form: bytes) -> int | None:
    """k if ``form`` is the canonical form of P_k, else None."""
    return _path_lengths().get(form)


@cache
def _known_names() -> dict[bytes, str]:
    names = {}
    for k in range(3, SMALL_GRAPH_LIMIT + 1):
        names[cycle_form(k)] = f"C{k}"
    names[canonical_form(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]))] = "K4"
    names[canonical_form(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]))] = "K1,3"
    names.update({f: f"P{k}" for f, k in _path_lengths().items()})
    return names


def describe(form: bytes) -> str:
    """Short human-readable name: P5, C6, K4, or the canonical code itself."""
    return _known_names().get(form) or form.decode("ascii")


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return g.n == h.n and g.edge_count == h.edge_count and canonical_form(g) == canonical_form(h)
