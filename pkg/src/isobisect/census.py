"""Vertex colourings and censuses of their monochromatic components."""
from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .canon import (
    CanonicalForm,
    canonical_form,
    cycle_form,
    describe,
    path_form,
    path_order,
)
from .graph import SMALL_GRAPH_LIMIT, Graph

RED = 0
BLUE = 1

OVERSIZED = CanonicalForm(b"!oversized")


@dataclass(frozen=True)
class VertexColoring:
    """Total red/blue assignment stored as bytes (0 = red, 1 = blue)."""

    colours: bytes

    def __post_init__(self):
        if any(c > 1 for c in self.colours):
            raise ValueError("colours must be 0 (red) or 1 (blue)")

    @classmethod
    def from_seq(cls, seq: Iterable[int]) -> VertexColoring:
        return cls(bytes(int(c) for c in seq))

    @classmethod
    def from_red_set(cls, n: int, red: Iterable[int]) -> VertexColoring:
        out = bytearray([BLUE]) * n
        for v in red:
            out[v] = RED
        return cls(bytes(out))

    @classmethod
    def from_array(cls, arr) -> VertexColoring:
        return cls(np.asarray(arr, dtype=np.int8).astype(np.uint8).tobytes())

    def __len__(self) -> int:
        return len(self.colours)

    def __getitem__(self, v: int) -> int:
        return self.colours[v]

    def __iter__(self):
        return iter(self.colours)

    def __array__(self, dtype=None, copy=None):
        arr = np.frombuffer(self.colours, dtype=np.uint8).astype(np.int8)
        return arr if dtype is None else arr.astype(dtype)

    @property
    def n(self) -> int:
        return len(self.colours)

    @property
    def red_count(self) -> int:
        return self.colours.count(RED)

    @property
    def imbalance(self) -> int:
        """#red - #blue."""
        return 2 * self.red_count - self.n

    def red(self) -> list[int]:
        return [v for v, c in enumerate(self.colours) if c == RED]

    def opposite(self) -> VertexColoring:
        return VertexColoring(bytes(1 - c for c in self.colours))

    def recoloured(self, updates: Mapping[int, int]) -> VertexColoring:
        out = bytearray(self.colours)
        for v, c in updates.items():
            out[v] = c
        return VertexColoring(bytes(out))

    def to_json(self) -> str:
        return self.colours.translate(bytes.maketrans(b"\x00\x01", b"RB")).decode()

    @classmethod
    def from_json(cls, text: str) -> VertexColoring:
        return cls(text.encode().translate(bytes.maketrans(b"RB", b"\x00\x01")))


@dataclass(frozen=True)
class ComponentCensus:
    """Multiset of components keyed by canonical form.

    Components above the small-graph limit are counted under ``OVERSIZED``
    and their vertex sets kept in ``oversized``.
    """

    counts: Mapping[bytes, int]
    oversized: tuple[tuple[int, ...], ...] = field(default=())

    def __getitem__(self, form: bytes) -> int:
        return self.counts.get(form, 0)

    def path_count(self, t: int) -> int:
        return self.counts.get(path_form(t), 0)

    def path_counts(self, max_t: int = 6) -> dict[int, int]:
        return {t: self.path_count(t) for t in range(1, max_t + 1)}

    @property
    def has_oversized(self) -> bool:
        return bool(self.oversized)

    def vertex_total(self) -> int:
        total = sum(len(c) for c in self.oversized)
        for form, k in self.counts.items():
            if form != OVERSIZED:
                total += k * _order_of(form)
        return total

    def same_multiset(self, other: ComponentCensus) -> bool:
        return dict(self.counts) == dict(other.counts)

    def to_json(self) -> dict[str, int]:
        return {describe(f): k for f, k in sorted(self.counts.items(), key=lambda kv: (describe(kv[0]), kv[0]))}


def _order_of(form: bytes) -> int:
    k = path_order(form)
    if k is not None:
        return k
    code = form.split(b"|")[0]
    return code[0] - 63


def _component_key(g: Graph, verts, size: int, edges: int, maxdeg: int) -> bytes:
    if size > SMALL_GRAPH_LIMIT:
        return OVERSIZED
    if edges == size - 1 and maxdeg <= 2:
        return path_form(size)
    if edges == size and maxdeg == 2:
        return cycle_form(size)
    h, _ = g.induced(verts)
    return canonical_form(h)


def colour_censuses(g: Graph, colouring: Sequence[int]) -> tuple[ComponentCensus, ComponentCensus]:
    """Red and blue censuses in one pass."""
    col = np.asarray(colouring, dtype=np.int8)
    if col.shape[0] != g.n:
        raise ValueError(f"colouring has {col.shape[0]} entries for {g.n} vertices")
    comp, sizes, edges, maxdeg = kernels.label_components(g.adj_array, col)
    # first vertex of every component, to read its colour
    order = np.argsort(comp, kind="stable")
    starts = np.searchsorted(comp[order], np.arange(len(sizes)))
    first = order[starts]
    comp_colour = col[first]
    counts = (Counter(), Counter())
    big: tuple[list, list] = ([], [])
    simple = (edges == sizes - 1) & (maxdeg <= 2) & (sizes <= SMALL_GRAPH_LIMIT)
    for c in (RED, BLUE):
        mask = simple & (comp_colour == c)
        for size, k in zip(*np.unique(sizes[mask], return_counts=True)):
            counts[c][path_form(int(size))] += int(k)
    members = None
    for k in np.flatnonzero(~simple):
        if members is None:
            bounds = np.append(starts, len(order))
            members = (order, bounds)
        verts = sorted(members[0][members[1][k] : members[1][k + 1]].tolist())
        c = int(comp_colour[k])
        key = _component_key(g, verts, int(sizes[k]), int(edges[k]), int(maxdeg[k]))
        counts[c][key] += 1
        if key == OVERSIZED:
            big[c].append(tuple(verts))
    return (
        ComponentCensus(dict(counts[RED]), tuple(big[RED])),
        ComponentCensus(dict(counts[BLUE]), tuple(big[BLUE])),
    )


def census(g: Graph, colouring: Sequence[int], colour: int) -> ComponentCensus:
    """Census of the components induced by one colour class."""
    return colour_censuses(g, colouring)[colour]


def local_components(g: Graph, colouring: Mapping[int, int] | Sequence[int], vertices: Iterable[int]):
    """Monochromatic components of the subgraph induced on ``vertices``.

    ``colouring`` may be partial (a dict) as long as it covers ``vertices``.
    Returns a list of ``(colour, sorted vertex tuple)``.
    """
    verts = set(vertices)
    seen: set[int] = set()
    out = []
    for s in sorted(verts):
        if s in seen:
            continue
        c = colouring[s]
        seen.add(s)
        comp = [s]
        stack = [s]
        while stack:
            v = stack.pop()
            for w in g.adj[v]:
                if w in verts and w not in seen and colouring[w] == c:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append((c, tuple(sorted(comp))))
    return out


def component_key(g: Graph, verts: Sequence[int]) -> bytes:
    """Canonical key of the induced subgraph on ``verts`` (OVERSIZED above the limit)."""
    if len(verts) > SMALL_GRAPH_LIMIT:
        return OVERSIZED
    h, _ = g.induced(verts)
    size = h.n
    edges = h.edge_count
    maxdeg = max((len(a) for a in h.adj), default=0)
    return _component_key(h, range(size), size, edges, maxdeg)


def region_census(g: Graph, colouring, vertices: Iterable[int]) -> tuple[ComponentCensus, ComponentCensus]:
    """Red and blue censuses of the subgraph induced on ``vertices``."""
    counts = (Counter(), Counter())
    big: tuple[list, list] = ([], [])
    for c, comp in local_components(g, colouring, vertices):
        key = component_key(g, comp)
        counts[c][key] += 1
        if key == OVERSIZED:
            big[c].append(comp)
    return (
        ComponentCensus(dict(counts[RED]), tuple(big[RED])),
        ComponentCensus(dict(counts[BLUE]), tuple(big[BLUE])),
    )
